#pragma once

#include <Eigen/Dense>

namespace prs {

/// exp(A) by scaling and squaring with diagonal Pade approximants
/// (degrees 3 through 13, Higham 2005 thresholds).
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

}  // namespace prs
