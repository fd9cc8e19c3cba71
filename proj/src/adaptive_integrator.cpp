#include "prs/adaptive_integrator.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/ublas/matrix.hpp>
#include <boost/numeric/ublas/vector.hpp>

#include "prs/errors.hpp"

namespace prs {

namespace {

namespace odeint = boost::numeric::odeint;
namespace ublas = boost::numeric::ublas;

using State = ublas::vector<double>;
using Jacobian = ublas::matrix<double>;

struct LinearSystem {
  const Eigen::SparseMatrix<double>* generator;

  void operator()(const State& x, State& dxdt, double /*t*/) const {
    const Eigen::Map<const Eigen::VectorXd> in(&x.data()[0], static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXd> out(&dxdt.data()[0], static_cast<Eigen::Index>(dxdt.size()));
    out = (*generator) * in;
  }
};

struct LinearJacobian {
  const Eigen::SparseMatrix<double>* generator;
  Jacobian dense;

  void operator()(const State& /*x*/, Jacobian& jacobian, double /*t*/, State& dfdt) {
    jacobian = dense;
    std::fill(dfdt.begin(), dfdt.end(), 0.0);
  }
};

}  // namespace

Eigen::VectorXd integrate_linear_adaptive(const Eigen::SparseMatrix<double>& generator,
                                          const Eigen::VectorXd& initial, double duration,
                                          double absolute_tolerance, double relative_tolerance) {
  const auto n = static_cast<std::size_t>(initial.size());
  State x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = initial[static_cast<Eigen::Index>(i)];
  if (duration == 0.0) return initial;

  LinearJacobian jacobian{&generator, Jacobian(n, n, 0.0)};
  for (int k = 0; k < generator.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(generator, k); it; ++it) {
      jacobian.dense(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col())) = it.value();
    }

  auto stepper = odeint::make_controlled(absolute_tolerance, relative_tolerance, odeint::rosenbrock4<double>());
  double t = 0.0;
  // Initial step well inside the fastest time scale.
  double dt = duration * 1e-6;
  const double fastest = generator.diagonal().cwiseAbs().maxCoeff();
  if (fastest > 0.0) dt = std::min(dt, 0.01 / fastest);
  std::size_t steps = 0;
  constexpr std::size_t kMaxSteps = 10'000'000;
  while (t < duration) {
    if (t + dt > duration) dt = duration - t;
    const auto outcome = stepper.try_step(std::make_pair(LinearSystem{&generator}, std::ref(jacobian)), x, t, dt);
    if (++steps > kMaxSteps) throw NumericError("integrate_linear_adaptive: step limit exceeded");
    (void)outcome;
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = x[i];
  return out;
}

}  // namespace prs
