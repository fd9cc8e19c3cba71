#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace prs {

/// Integrates dp/dt = G p over [0, duration] with an error-controlled
/// L-stable Rosenbrock stepper. Independent of the Pade route in
/// matrix_exponential, which it is used to cross-check.
Eigen::VectorXd integrate_linear_adaptive(const Eigen::SparseMatrix<double>& generator,
                                          const Eigen::VectorXd& initial, double duration,
                                          double absolute_tolerance, double relative_tolerance);

}  // namespace prs
