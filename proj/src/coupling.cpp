#include "prs/coupling.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace prs {

double generalized_laguerre(int n, int alpha, double x) {
  if (n < 0 || alpha < 0) {
    throw std::domain_error("generalized_laguerre: degree and order must be non-negative");
  }
  double previous = 1.0;
  if (n == 0) return previous;
  double current = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * current - (k + alpha) * previous) / (k + 1.0);
    previous = current;
    current = next;
  }
  return current;
}

double mode_factor(double eta, int n, int s) {
  const int final_n = n + s;
  if (n < 0 || final_n < 0) {
    throw std::domain_error("mode_factor: negative motional quantum number");
  }
  const int lower = std::min(n, final_n);
  const int order = std::abs(s);
  if (eta == 0.0) return order == 0 ? 1.0 : 0.0;
  const double x = eta * eta;
  // sqrt(n<! / n>!) via log-gamma to stay finite for large n.
  const double ratio = std::exp(0.5 * (std::lgamma(lower + 1.0) - std::lgamma(lower + order + 1.0)));
  return std::exp(-0.5 * x) * std::pow(eta, order) * ratio * generalized_laguerre(lower, order, x);
}

std::complex<double> xi(const LambDicke& eta, MotionalIndex n, SidebandOrder s) {
  const double magnitude = mode_factor(eta.ip, n.ip, s.ip) * mode_factor(eta.op, n.op, s.op);
  // i^(|s_ip| + |s_op|)
  static const std::complex<double> phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return magnitude * phases[(std::abs(s.ip) + std::abs(s.op)) % 4];
}

namespace {

double lamb_dicke_factor(double eta, int n, int s) {
  if (s < -1 || s > 1) return 0.0;
  if (n + s < 0) return 0.0;
  if (s == 0) return 1.0;
  const int upper = std::max(n, n + s);
  return eta * std::sqrt(static_cast<double>(upper));
}

}  // namespace

double xi_lamb_dicke(const LambDicke& eta, MotionalIndex n, SidebandOrder s) {
  return lamb_dicke_factor(eta.ip, n.ip, s.ip) * lamb_dicke_factor(eta.op, n.op, s.op);
}

double rabi(double omega_0, std::complex<double> xi_value) {
  if (omega_0 < 0.0) throw std::domain_error("rabi: omega_0 must be non-negative");
  return omega_0 * std::abs(xi_value);
}

CouplingTable::CouplingTable(const LambDicke& eta, int n_ip_max, int n_op_max, int s_ip_max,
                             int s_op_max)
    : s_ip_max_(s_ip_max),
      s_op_max_(s_op_max),
      ip_stride_(2 * s_ip_max + 1),
      op_stride_(2 * s_op_max + 1),
      ip_(static_cast<std::size_t>((n_ip_max + 1) * ip_stride_), 0.0),
      op_(static_cast<std::size_t>((n_op_max + 1) * op_stride_), 0.0) {
  const auto fill = [](std::vector<double>& table, double eta_mode, int n_max, int s_max) {
    const int stride = 2 * s_max + 1;
    for (int n = 0; n <= n_max; ++n) {
      for (int s = -s_max; s <= s_max; ++s) {
        if (n + s < 0) continue;
        const double f = mode_factor(eta_mode, n, s);
        table[n * stride + s + s_max] = f * f;
      }
    }
  };
  fill(ip_, eta.ip, n_ip_max, s_ip_max);
  fill(op_, eta.op, n_op_max, s_op_max);
}

}  // namespace prs
