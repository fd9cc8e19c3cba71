#pragma once

#include <functional>
#include <vector>

namespace prs {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Nodes and weights of the `order`-point Gauss-Legendre rule, found by
/// Newton iteration on the Legendre recurrence.
GaussLegendreRule gauss_legendre(int order);

/// Adaptive Gauss-Kronrod integration over [a, b]; throws NumericError if
/// the error estimate stays above `relative_tolerance`.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double relative_tolerance = 1e-10);

}  // namespace prs
