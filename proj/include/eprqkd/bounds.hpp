#pragma once

// Closed-form security-parameter formulas: binary entropy, the entropy-deficit
// term theta(r), the key-entropy lower bound, setup arithmetic and the
// asymptotic net-gain condition.

#include <cstddef>

namespace eprqkd::bounds {

/// h(p) = -p log2 p - (1-p) log2(1-p), with h(0) = h(1) = 0.
/// Throws ParameterError for p outside [0, 1].
double binary_entropy(double p);

/// 2^{-(1 - h(1/2 - 3 tau / 16)) (tau / 2) r}. Domain: 0 <= tau <= 8/3.
double theta(double r, double tau);

struct EntropyBound {
  double raw = 0.0;      ///< m - 2(m + 1/ln 2)(theta + 2 sqrt(theta)); may be negative.
  double clamped = 0.0;  ///< raw clamped to [0, m].
};

/// Lower bound on H(key | eavesdropper view). Throws for theta outside [0, 1].
EntropyBound entropy_lower_bound(std::size_t m, double theta);

struct ProtocolParams {
  std::size_t m = 0;       ///< private key length
  double epsilon = 0.0;    ///< error-rate threshold, < 1/4
  double tau = 0.0;        ///< security constant
  double tau_s = 0.0;      ///< sifting margin constant
  std::size_t r = 0;       ///< reconciled-set size
  std::size_t s = 0;       ///< sifted-set size, floor(r / (1 - epsilon))
  std::size_t n = 0;       ///< photon pairs, ceil(r / ((1 - epsilon)/2 - tau_s))
  std::size_t d_k = 0;     ///< ceil((2 epsilon/(1 - epsilon) + tau) r)
  std::size_t q_min = 0;   ///< ceil(s h(epsilon)), asymptotic pad budget
  std::size_t feasible_m_max = 0;  ///< floor(r (1 - h(epsilon/(1-epsilon) + tau/2)))
  bool feasible = false;   ///< m <= feasible_m_max
};

/// Fills every derived field. Throws ParameterError naming the first violated
/// constraint.
ProtocolParams derive_params(std::size_t m, double epsilon, double tau, double tau_s,
                             std::size_t r);

/// Checks the ProtocolParams invariants; returns an empty string when all hold,
/// otherwise a description of the first violation.
const char* check_params(const ProtocolParams& p);

/// 1 - h(eps/(1-eps)) - h(eps)/(1-eps); positive means net key gain is possible
/// asymptotically. Domain: 0 <= eps < 1/4.
double net_gain_margin(double epsilon);

/// Root of net_gain_margin on (0, 1/4) by bisection, within `tolerance`.
double epsilon_star(double tolerance);

struct BoundReport {
  double theta = 1.0;
  double entropy_lower_bound_raw = 0.0;
  double entropy_lower_bound = 0.0;
  std::size_t feasible_m_max = 0;
  double net_gain_margin = 0.0;
};

BoundReport bound_report(const ProtocolParams& params);

}  // namespace eprqkd::bounds
