#include "eprqkd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eprqkd/errors.hpp"

namespace eprqkd::bounds {

namespace {

// Absorbs the last-ulp noise of products such as (2*0.2/0.8 + 0.1) * 800 so
// that exact setup values round as written.
constexpr double kRoundingSlack = 1e-9;

std::size_t ceil_exact(double x) { return static_cast<std::size_t>(std::ceil(x - kRoundingSlack)); }
std::size_t floor_exact(double x) {
  return static_cast<std::size_t>(std::floor(x + kRoundingSlack));
}

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError("binary entropy argument " + std::to_string(p) + " outside [0, 1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double theta(double r, double tau) {
  if (!(tau >= 0.0) || !(0.5 - 3.0 * tau / 16.0 >= 0.0)) {
    throw ParameterError("theta requires 0 <= tau <= 8/3 (got " + std::to_string(tau) + ")");
  }
  if (!(r >= 0.0)) throw ParameterError("theta requires r >= 0");
  const double exponent = (1.0 - binary_entropy(0.5 - 3.0 * tau / 16.0)) * (tau / 2.0) * r;
  return std::exp2(-exponent);
}

EntropyBound entropy_lower_bound(std::size_t m, double theta_value) {
  if (!(theta_value >= 0.0 && theta_value <= 1.0)) {
    throw ParameterError("theta must lie in [0, 1]");
  }
  const double md = static_cast<double>(m);
  EntropyBound b;
  b.raw = md - 2.0 * (md + std::numbers::log2e) * (theta_value + 2.0 * std::sqrt(theta_value));
  b.clamped = std::clamp(b.raw, 0.0, md);
  return b;
}

ProtocolParams derive_params(std::size_t m, double epsilon, double tau, double tau_s,
                             std::size_t r) {
  if (m == 0) throw ParameterError("m must be positive");
  if (r == 0) throw ParameterError("r must be positive");
  if (!(epsilon >= 0.0 && epsilon < 0.25)) {
    throw ParameterError("epsilon must satisfy 0 <= epsilon < 1/4");
  }
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  const double ratio = 2.0 * epsilon / (1.0 - epsilon);
  if (!(ratio + tau < 1.0)) throw ParameterError("2 epsilon/(1 - epsilon) + tau must be < 1");
  const double sift_rate = (1.0 - epsilon) / 2.0 - tau_s;
  if (!(tau_s > 0.0 && sift_rate > 0.0)) {
    throw ParameterError("tau_s must satisfy 0 < tau_s < (1 - epsilon)/2");
  }

  ProtocolParams p;
  p.m = m;
  p.epsilon = epsilon;
  p.tau = tau;
  p.tau_s = tau_s;
  p.r = r;
  const double rd = static_cast<double>(r);
  p.s = floor_exact(rd / (1.0 - epsilon));
  p.d_k = ceil_exact((ratio + tau) * rd);
  p.n = ceil_exact(rd / sift_rate);
  p.q_min = ceil_exact(static_cast<double>(p.s) * binary_entropy(epsilon));
  const double pa_rate = 1.0 - binary_entropy(std::min(0.5, epsilon / (1.0 - epsilon) + tau / 2.0));
  p.feasible_m_max = floor_exact(rd * pa_rate);
  p.feasible = m <= p.feasible_m_max;
  return p;
}

const char* check_params(const ProtocolParams& p) {
  if (!(p.epsilon < 0.25)) return "epsilon < 1/4";
  const double ratio = 2.0 * p.epsilon / (1.0 - p.epsilon);
  if (!(p.tau > 0.0 && ratio + p.tau < 1.0)) return "0 < tau and 2 epsilon/(1-epsilon) + tau < 1";
  const double sift_rate = (1.0 - p.epsilon) / 2.0 - p.tau_s;
  if (!(p.tau_s > 0.0 && sift_rate > 0.0)) return "0 < tau_s < (1 - epsilon)/2";
  const double rd = static_cast<double>(p.r);
  if (p.s != floor_exact(rd / (1.0 - p.epsilon))) return "s = floor(r/(1 - epsilon))";
  if (p.d_k != ceil_exact((ratio + p.tau) * rd)) return "d_K = ceil((2 epsilon/(1-epsilon) + tau) r)";
  if (p.n < ceil_exact(rd / sift_rate)) return "n >= ceil(r/((1 - epsilon)/2 - tau_s))";
  return "";
}

double net_gain_margin(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.25)) {
    throw ParameterError("net gain margin requires 0 <= epsilon < 1/4");
  }
  return 1.0 - binary_entropy(epsilon / (1.0 - epsilon)) -
         binary_entropy(epsilon) / (1.0 - epsilon);
}

double epsilon_star(double tolerance) {
  if (!(tolerance > 0.0)) throw ParameterError("tolerance must be positive");
  double lo = 0.0;
  double hi = std::nextafter(0.25, 0.0);
  if (!(net_gain_margin(lo) > 0.0 && net_gain_margin(hi) < 0.0)) {
    throw ProtocolError("net gain margin does not change sign on (0, 1/4)");
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (net_gain_margin(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

BoundReport bound_report(const ProtocolParams& params) {
  BoundReport report;
  report.theta = theta(static_cast<double>(params.r), params.tau);
  const auto b = entropy_lower_bound(params.m, report.theta);
  report.entropy_lower_bound_raw = b.raw;
  report.entropy_lower_bound = b.clamped;
  report.feasible_m_max = params.feasible_m_max;
  report.net_gain_margin = net_gain_margin(params.epsilon);
  return report;
}

}  // namespace eprqkd::bounds
