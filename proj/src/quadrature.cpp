#include "prs/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

#include "prs/constants.hpp"
#include "prs/errors.hpp"

namespace prs {

GaussLegendreRule gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(constants::pi * (i + 0.75) / (order + 0.5));
    double derivative = 0.0;
    for (int iteration = 0; iteration < 100; ++iteration) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double relative_tolerance) {
  using boost::math::quadrature::gauss_kronrod;
  // A single 61-point panel can miss a narrow peak in a wide range and still
  // report a tiny error, so start from a few panels.
  constexpr int panels = 8;
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + (b - a) * k / panels;
    const double hi = k + 1 == panels ? b : a + (b - a) * (k + 1) / panels;
    double panel_error = 0.0;
    double panel_l1 = 0.0;
    value += gauss_kronrod<double, 61>::integrate(f, lo, hi, 25, relative_tolerance, &panel_error, &panel_l1);
    error += panel_error;
    l1 += panel_l1;
  }
  if (error > std::max(relative_tolerance * l1, 1e-300) * 10.0) {
    throw NumericError("integrate_adaptive: tolerance not reached");
  }
  return value;
}

}  // namespace prs
