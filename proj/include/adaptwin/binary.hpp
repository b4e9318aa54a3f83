#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace adaptwin {

/// Exact nonnegative rational used for discrepancy values of the binary class.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.num * b.den == b.num * a.den; }
  friend auto operator<=>(const Rational& a, const Rational& b) { return a.num * b.den <=> b.num * a.den; }
};

struct LabeledPoint {
  double x = 0.0;
  int y = 0;  // 0 or 1

  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

inline void validate(const LabeledPoint& p) {
  if (!(p.x >= 0.0 && p.x <= 1.0)) throw std::domain_error("LabeledPoint: x must lie in [0,1]");
  if (p.y != 0 && p.y != 1) throw std::domain_error("LabeledPoint: y must be 0 or 1");
}

inline LabeledPoint flipped(LabeledPoint p) { return {p.x, 1 - p.y}; }

enum class Orientation {
  GeqIsOne,  // h(x) = 1 iff x >= cutoff
  LtIsOne,   // h(x) = 1 iff x < cutoff
};

/// One-dimensional threshold classifier. The class is closed under
/// complement: the same cutoff with the other orientation gives 1 - h.
struct ThresholdHypothesis {
  double cutoff = 0.0;
  Orientation orientation = Orientation::GeqIsOne;

  [[nodiscard]] int predict(double x) const {
    const bool above = x >= cutoff;
    return orientation == Orientation::GeqIsOne ? int(above) : int(!above);
  }
  /// Zero-one loss 1{y != h(x)}.
  [[nodiscard]] int loss(const LabeledPoint& p) const { return predict(p.x) != p.y ? 1 : 0; }
  [[nodiscard]] ThresholdHypothesis complement() const {
    return {cutoff, orientation == Orientation::GeqIsOne ? Orientation::LtIsOne : Orientation::GeqIsOne};
  }

  friend bool operator==(const ThresholdHypothesis&, const ThresholdHypothesis&) = default;
};

struct EmpiricalRisk {
  ThresholdHypothesis hypothesis;
  std::int64_t mistakes = 0;
  std::int64_t count = 1;

  [[nodiscard]] Rational risk() const { return {mistakes, count}; }
};

/// Exact empirical risk minimization over thresholds.
///
/// Points are grouped by distinct x; every split "first k groups vs the rest"
/// is evaluated for both orientations in one sweep. The reported cutoff is 0
/// for k = 0, the midpoint between groups k-1 and k, or 1 for k = groups.
/// Ties go to the smallest cutoff, then GeqIsOne.
inline EmpiricalRisk erm_threshold(std::span<const LabeledPoint> points) {
  if (points.empty()) throw std::domain_error("erm_threshold: empty sample");

  std::vector<LabeledPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.x < b.x; });

  struct Group {
    double x;
    std::int64_t ones;
    std::int64_t zeros;
  };
  std::vector<Group> groups;
  for (const auto& p : sorted) {
    validate(p);
    if (groups.empty() || groups.back().x != p.x) groups.push_back({p.x, 0, 0});
    (p.y == 1 ? groups.back().ones : groups.back().zeros) += 1;
  }

  std::int64_t total_ones = 0;
  std::int64_t total_zeros = 0;
  for (const auto& g : groups) {
    total_ones += g.ones;
    total_zeros += g.zeros;
  }

  const std::size_t n_groups = groups.size();
  const bool top_at_one = groups.back().x >= 1.0;

  EmpiricalRisk best;
  best.count = static_cast<std::int64_t>(points.size());
  best.mistakes = best.count + 1;

  // Below the split: groups [0, k). GeqIsOne predicts 0 there and 1 above.
  std::int64_t ones_below = 0;
  std::int64_t zeros_below = 0;
  for (std::size_t k = 0; k <= n_groups; ++k) {
    if (k > 0) {
      ones_below += groups[k - 1].ones;
      zeros_below += groups[k - 1].zeros;
    }
    double cutoff;
    if (k == 0) {
      cutoff = 0.0;
    } else if (k == n_groups) {
      // A cutoff of 1 cannot place a point at x = 1 below the split; the same
      // labeling is realized by the complement orientation at k = 0.
      if (top_at_one) continue;
      cutoff = 1.0;
    } else {
      const double lo = groups[k - 1].x;
      const double hi = groups[k].x;
      cutoff = lo + (hi - lo) / 2.0;
    }
    const std::int64_t geq = ones_below + (total_zeros - zeros_below);
    const std::int64_t lt = zeros_below + (total_ones - ones_below);
    if (geq < best.mistakes) best = {{cutoff, Orientation::GeqIsOne}, geq, best.count};
    if (lt < best.mistakes) best = {{cutoff, Orientation::LtIsOne}, lt, best.count};
  }
  return best;
}

namespace detail {

inline std::int64_t check_windows(std::span<const LabeledPoint> recent, std::span<const LabeledPoint> older) {
  if (recent.empty() || recent.size() != older.size())
    throw std::domain_error("binary discrepancy: windows must be non-empty and of equal size");
  return static_cast<std::int64_t>(recent.size());
}

// ERM over {flip(first)} U {second}; returns the minimal mistake count.
inline std::int64_t erm_flip_first(std::span<const LabeledPoint> first, std::span<const LabeledPoint> second) {
  std::vector<LabeledPoint> merged;
  merged.reserve(first.size() + second.size());
  for (const auto& p : first) merged.push_back(flipped(p));
  merged.insert(merged.end(), second.begin(), second.end());
  return erm_threshold(merged).mistakes;
}

}  // namespace detail

/// Discrepancy between the empirical distributions of the newest r and newest
/// 2r samples, via a single ERM on the 2r points with the recent labels
/// flipped: 1/2 - (mistakes / r) / 2 = (r - mistakes) / (2r).
inline Rational discrepancy_binary(std::span<const LabeledPoint> recent, std::span<const LabeledPoint> older) {
  const std::int64_t r = detail::check_windows(recent, older);
  const std::int64_t m = detail::erm_flip_first(recent, older);
  return {r - m, 2 * r};
}

/// Same quantity without using the complement symmetry of the class: the two
/// one-sided suprema are each obtained from their own ERM problem.
inline Rational discrepancy_binary_general(std::span<const LabeledPoint> recent,
                                           std::span<const LabeledPoint> older) {
  const std::int64_t r = detail::check_windows(recent, older);
  const std::int64_t m_recent_flipped = detail::erm_flip_first(recent, older);
  const std::int64_t m_older_flipped = detail::erm_flip_first(older, recent);
  return {std::max(r - m_recent_flipped, r - m_older_flipped), 2 * r};
}

/// Definition-level evaluation: (1/2) max_h |mean loss on recent - mean loss on
/// older| over cutoffs {0, 1} and every observed x, both orientations.
/// Quadratic cost; intended as ground truth for r <= 64.
inline Rational brute_force_discrepancy(std::span<const LabeledPoint> recent, std::span<const LabeledPoint> older) {
  const std::int64_t r = detail::check_windows(recent, older);
  if (r > 64) throw std::domain_error("brute_force_discrepancy: r must be <= 64");

  std::vector<double> cutoffs{0.0, 1.0};
  for (const auto& p : recent) cutoffs.push_back(p.x);
  for (const auto& p : older) cutoffs.push_back(p.x);

  std::int64_t best = 0;
  for (double c : cutoffs) {
    for (Orientation o : {Orientation::GeqIsOne, Orientation::LtIsOne}) {
      const ThresholdHypothesis h{c, o};
      std::int64_t diff = 0;
      for (const auto& p : recent) diff += h.loss(p);
      for (const auto& p : older) diff -= h.loss(p);
      best = std::max(best, diff < 0 ? -diff : diff);
    }
  }
  return {best, 2 * r};
}

}  // namespace adaptwin
