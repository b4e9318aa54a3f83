#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "adaptwin/config.hpp"
#include "adaptwin/scenario.hpp"

namespace adaptwin {

/// Anything that can report true window discrepancies of its own sequence.
template <typename S>
concept DriftOracle = requires(const S& s, TimeRange a, std::size_t lag) {
  { s.horizon() } -> std::convertible_to<std::size_t>;
  { s.discrepancy(a, a) } -> std::convertible_to<double>;
  { s.drift(lag) } -> std::convertible_to<double>;
};

/// Multiplier of S(r) in the bound U(r) = 21 S(r) + ||P_T - P_T^r||.
inline constexpr double kBoundStatFactor = 21.0;

struct BoundRow {
  std::size_t r = 1;
  double stat = 0.0;         // S(r, delta)
  double max_drift = 0.0;    // max_{t < r} ||P_T - P_{T-t}||
  double window_drift = 0.0; // ||P_T - P_T^r||
  double u = 0.0;            // 21 S + window_drift
  double b = 0.0;            // 21 S + max_drift
};

/// Oracle-side view of the bound for one scenario and configuration.
/// Rows cover r in {1, 2, 4, ...} plus T; B* and r_star minimize `b` over them.
struct BoundProfile {
  std::vector<BoundRow> rows;
  double b_star = 0.0;
  std::size_t r_star = 1;
  bool exact = true;       // false when the drift oracle is approximate
  double tolerance = 0.0;  // reported accuracy of an approximate oracle

  /// U(r) for any r <= T (not only lattice points).
  template <DriftOracle S>
  [[nodiscard]] static double u_at(const S& scenario, std::size_t r, const AlgoConfig& cfg) {
    const std::size_t horizon = scenario.horizon();
    if (r == 0 || r > horizon) throw std::domain_error("u_at: r must lie in [1, T]");
    return kBoundStatFactor * stat_bound(r, cfg) +
           scenario.discrepancy(TimeRange::at(horizon), TimeRange::newest(horizon, r));
  }
};

/// Window sizes of the lattice: powers of two up to T, plus T itself.
inline std::vector<std::size_t> lattice_windows(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t r = 1; r <= horizon; r *= 2) out.push_back(r);
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

/// max_{t < r} drift(t) for r = 1..T, as a prefix maximum (index r - 1).
template <DriftOracle S>
std::vector<double> prefix_max_drift(const S& scenario) {
  const std::size_t horizon = scenario.horizon();
  std::vector<double> out(horizon, 0.0);
  double running = 0.0;
  for (std::size_t r = 2; r <= horizon; ++r) {
    running = std::max(running, scenario.drift(r - 1));
    out[r - 1] = running;
  }
  return out;
}

template <DriftOracle S>
BoundProfile bound_profile(const S& scenario, const AlgoConfig& cfg) {
  cfg.validate();
  const std::size_t horizon = scenario.horizon();
  const std::vector<double> max_drift = prefix_max_drift(scenario);

  BoundProfile profile;
  if constexpr (requires { scenario.tolerance(); }) {
    profile.exact = false;
    profile.tolerance = scenario.tolerance();
  }
  profile.b_star = std::numeric_limits<double>::infinity();
  for (std::size_t r : lattice_windows(horizon)) {
    BoundRow row;
    row.r = r;
    row.stat = stat_bound(r, cfg);
    row.max_drift = max_drift[r - 1];
    row.window_drift = scenario.discrepancy(TimeRange::at(horizon), TimeRange::newest(horizon, r));
    row.u = kBoundStatFactor * row.stat + row.window_drift;
    row.b = kBoundStatFactor * row.stat + row.max_drift;
    if (row.b < profile.b_star) {
      profile.b_star = row.b;
      profile.r_star = r;
    }
    profile.rows.push_back(row);
  }
  return profile;
}

}  // namespace adaptwin
