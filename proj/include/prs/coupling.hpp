#pragma once

#include <complex>
#include <vector>

#include "prs/ion_mechanics.hpp"

namespace prs {

struct MotionalIndex {
  int ip = 0;
  int op = 0;
};

struct SidebandOrder {
  int ip = 0;
  int op = 0;
};

/// Generalized Laguerre polynomial L_n^alpha(x), three-term recurrence in n.
double generalized_laguerre(int n, int alpha, double x);

/// Real single-mode coupling factor between Fock states n and n + s:
///   exp(-eta^2/2) eta^|s| sqrt(n<! / n>!) L_{n<}^{|s|}(eta^2).
/// The full amplitude carries an extra phase i^|s|.
double mode_factor(double eta, int n, int s);

/// Sideband coupling amplitude xi for the transition n -> n + s.
/// Throws std::domain_error when n or n + s has a negative component.
std::complex<double> xi(const LambDicke& eta, MotionalIndex n, SidebandOrder s);

/// Lamb-Dicke limit of |xi|; zero for |s| > 1 in either mode.
double xi_lamb_dicke(const LambDicke& eta, MotionalIndex n, SidebandOrder s);

/// Sideband Rabi frequency omega_0 |xi|.
double rabi(double omega_0, std::complex<double> xi_value);

/// Precomputed |xi|^2 over a motional grid and sideband range. Because
/// xi factorizes over modes, only the two per-mode tables are stored.
class CouplingTable {
 public:
  CouplingTable(const LambDicke& eta, int n_ip_max, int n_op_max, int s_ip_max, int s_op_max);

  /// |xi|^2 for n -> n + s; zero when n + s has a negative component.
  double strength(MotionalIndex n, SidebandOrder s) const {
    return ip_[n.ip * ip_stride_ + s.ip + s_ip_max_] * op_[n.op * op_stride_ + s.op + s_op_max_];
  }

  int s_ip_max() const { return s_ip_max_; }
  int s_op_max() const { return s_op_max_; }

 private:
  int s_ip_max_;
  int s_op_max_;
  int ip_stride_;
  int op_stride_;
  std::vector<double> ip_;
  std::vector<double> op_;
};

}  // namespace prs
