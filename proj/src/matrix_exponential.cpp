#include "prs/matrix_exponential.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace prs {

namespace {

using Eigen::MatrixXd;

// Backward-error thresholds on ||A||_1 for Pade degrees 3, 5, 7, 9, 13.
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                          2.097847961257068e0, 5.371920351148152e0};

void pade3(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {120.0, 60.0, 12.0, 1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  u = a * (b[3] * a2 + b[1] * id);
  v = b[2] * a2 + b[0] * id;
}

void pade5(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade7(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade9(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                          2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd a8 = a6 * a2;
  u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade13(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {64764752532480000.0,
                          32382376266240000.0,
                          7771770303897600.0,
                          1187353796428800.0,
                          129060195264000.0,
                          10559470521600.0,
                          670442572800.0,
                          33522128640.0,
                          1323241920.0,
                          40840800.0,
                          960960.0,
                          16380.0,
                          182.0,
                          1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  MatrixXd tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  tmp = a6 * tmp;
  tmp += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  u = a * tmp;
  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * tmp;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exponential: matrix must be square");
  if (a.size() == 0) return a;
  if (!a.allFinite()) throw std::domain_error("matrix_exponential: non-finite entries");

  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  MatrixXd u;
  MatrixXd v;
  int squarings = 0;
  if (norm < kTheta[0]) {
    pade3(a, u, v);
  } else if (norm < kTheta[1]) {
    pade5(a, u, v);
  } else if (norm < kTheta[2]) {
    pade7(a, u, v);
  } else if (norm < kTheta[3]) {
    pade9(a, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta[4]))));
    pade13(a / std::ldexp(1.0, squarings), u, v);
  }
  MatrixXd result = (v - u).partialPivLu().solve(u + v);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace prs
