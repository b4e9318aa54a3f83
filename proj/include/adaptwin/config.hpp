#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace adaptwin {

/// Constants that drive every statistical threshold of the window selector.
///
/// `c1` and `c2` are the uniform-convergence constants of the function family
/// (first-moment and deviation terms), `delta` the overall failure probability
/// and `alpha` the approximation factor of an approximate discrepancy oracle.
struct AlgoConfig {
  double c1 = 1.0;
  double c2 = 1.0;
  double delta = 0.1;
  double alpha = 1.0;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0))
      throw std::domain_error("AlgoConfig: delta must lie in (0,1), got " + std::to_string(delta));
    if (!(c1 >= 0.0) || !(c2 >= 0.0))
      throw std::domain_error("AlgoConfig: c1 and c2 must be nonnegative");
    if (!(alpha >= 1.0))
      throw std::domain_error("AlgoConfig: alpha must be >= 1");
  }

  /// c1 + c2 * sqrt(2 ln(pi^2 / (6 delta))). Always recomputed from the fields.
  [[nodiscard]] double c_delta() const {
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    return c1 + c2 * std::sqrt(2.0 * std::log(pi2 / (6.0 * delta)));
  }
};

/// High-probability bound on the statistical error of a window of size r:
///   c_delta / sqrt(r) + c2 * sqrt(2 ln(log2(r) + 10) / r).
inline double stat_bound(std::size_t r, const AlgoConfig& cfg) {
  if (r == 0) throw std::domain_error("stat_bound: window size must be >= 1");
  const double rr = static_cast<double>(r);
  const double log_term = std::log(std::log2(rr) + 10.0);
  return cfg.c_delta() / std::sqrt(rr) + cfg.c2 * std::sqrt(2.0 * log_term / rr);
}

/// Guard used by the selector: the window doubles while the empirical
/// discrepancy stays at or below this value.
inline double stopping_threshold(std::size_t r, const AlgoConfig& cfg) {
  return 4.0 * stat_bound(r, cfg);
}

/// Per-iteration failure budget 6 delta / (pi^2 (i + 10)^2); sums to at most delta.
inline double delta_schedule(std::size_t i, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta_schedule: delta must lie in (0,1)");
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double k = static_cast<double>(i) + 10.0;
  return 6.0 * delta / (pi2 * k * k);
}

/// Coefficients of the monotonicity inequality lead * S(2r) - trail * S(r) <= 0
/// that makes the bound U non-increasing across a passed check.
struct ProofConstants {
  double lead = 22.0;
  double trail = 16.0;
};

/// True iff lead * S(2^{i+1}) - trail * S(2^i) <= 0 for every i in [0, i_max].
inline bool proof_inequality_check(std::size_t i_max, const AlgoConfig& cfg, ProofConstants k = {}) {
  if (i_max >= 62) throw std::domain_error("proof_inequality_check: i_max must be < 62");
  for (std::size_t i = 0; i <= i_max; ++i) {
    const std::size_t r = std::size_t{1} << i;
    if (k.lead * stat_bound(2 * r, cfg) - k.trail * stat_bound(r, cfg) > 0.0) return false;
  }
  return true;
}

}  // namespace adaptwin
