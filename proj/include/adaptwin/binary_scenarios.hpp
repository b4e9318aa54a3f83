#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adaptwin/binary.hpp"
#include "adaptwin/random.hpp"
#include "adaptwin/scenario.hpp"

namespace adaptwin {

/// A sequence P_1..P_T of distributions over [0,1] x {0,1} with exact oracles
/// for the threshold class: window discrepancies, true risk at time T and the
/// best risk in class at time T.
class BinaryScenario {
 public:
  explicit BinaryScenario(std::size_t horizon) : horizon_(horizon) {
    if (horizon == 0) throw std::domain_error("scenario: T must be >= 1");
  }
  virtual ~BinaryScenario() = default;

  [[nodiscard]] std::size_t horizon() const { return horizon_; }

  /// Draw of Z_t; uses only the generator it is handed.
  [[nodiscard]] virtual LabeledPoint sample(std::size_t t, CounterRng& rng) const = 0;

  /// sup_h |E_A L_h - E_B L_h| between the window averages of two ranges.
  [[nodiscard]] virtual double discrepancy(TimeRange a, TimeRange b) const = 0;

  /// P_T(L_h).
  [[nodiscard]] virtual double risk(const ThresholdHypothesis& h) const = 0;

  /// min_h P_T(L_h) over thresholds.
  [[nodiscard]] virtual double best_risk() const = 0;

  /// ||P_T - P_{T-lag}||; zero at lag 0.
  [[nodiscard]] double drift(std::size_t lag) const {
    if (lag >= horizon_) throw std::domain_error("drift: lag must be < T");
    if (lag == 0) return 0.0;
    return discrepancy(TimeRange::at(horizon_ - lag), TimeRange::at(horizon_));
  }

  /// Z_1..Z_T for one experiment key. Z_t depends only on (key, t).
  [[nodiscard]] std::vector<LabeledPoint> stream(std::uint64_t key) const {
    std::vector<LabeledPoint> out;
    out.reserve(horizon_);
    for (std::size_t t = 1; t <= horizon_; ++t) {
      CounterRng rng(key, t);
      out.push_back(sample(t, rng));
    }
    return out;
  }

 protected:
  void check_range(TimeRange r) const {
    if (r.first < 1 || r.first > r.last || r.last > horizon_)
      throw std::domain_error("scenario: time range outside [1, T]");
  }

 private:
  std::size_t horizon_;
};

// ---------------------------------------------------------------------------
// uniform marginal, step-function conditional

/// Pr(Y = 1 | x) for x uniform on [0,1], right-continuous and piecewise
/// constant: values[k] holds on [edges[k-1], edges[k]) with the outer edges
/// at 0 and 1.
struct StepLaw {
  std::vector<double> edges;
  std::vector<double> values{0.0};

  static StepLaw constant(double p) { return StepLaw{{}, {p}}; }

  /// Law that takes the value prob_at(mid) on each piece between consecutive
  /// breakpoints; breakpoints outside (0,1) and duplicates are dropped.
  template <typename F>
  static StepLaw from_pieces(std::vector<double> breaks, F&& prob_at) {
    std::erase_if(breaks, [](double b) { return !(b > 0.0 && b < 1.0); });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    StepLaw law;
    law.values.clear();
    double lo = 0.0;
    for (std::size_t k = 0; k <= breaks.size(); ++k) {
      const double hi = k < breaks.size() ? breaks[k] : 1.0;
      law.values.push_back(prob_at(lo + (hi - lo) / 2.0));
      lo = hi;
    }
    law.edges = std::move(breaks);
    return law;
  }

  [[nodiscard]] double prob_one(double x) const {
    const auto k = std::upper_bound(edges.begin(), edges.end(), x) - edges.begin();
    return values[static_cast<std::size_t>(k)];
  }

  /// Integral of Pr(Y=1|x) over [0, c].
  [[nodiscard]] double integral(double c) const {
    c = std::clamp(c, 0.0, 1.0);
    double acc = 0.0;
    double lo = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double hi = k < edges.size() ? edges[k] : 1.0;
      if (c <= lo) break;
      acc += values[k] * (std::min(c, hi) - lo);
      lo = hi;
    }
    return acc;
  }

  [[nodiscard]] double risk(const ThresholdHypothesis& h) const {
    const double c = std::clamp(h.cutoff, 0.0, 1.0);
    const double below = integral(c);
    const double above = integral(1.0) - below;
    // GeqIsOne errs on the ones below c and the zeros above it.
    if (h.orientation == Orientation::GeqIsOne) return below + ((1.0 - c) - above);
    return (c - below) + above;
  }

  [[nodiscard]] double best_risk() const {
    double best = 1.0;
    auto consider = [&](double c) {
      best = std::min(best, risk({c, Orientation::GeqIsOne}));
      best = std::min(best, risk({c, Orientation::LtIsOne}));
    };
    consider(0.0);
    for (double e : edges) consider(e);
    consider(1.0);
    return best;
  }
};

/// Threshold-class discrepancy between sum_k w_k Q_k and zero, for signed
/// weights (a difference of two mixtures). With F(c) the integral of the
/// signed conditional over [0,c], the threshold (c, GeqIsOne) gives
/// 2F(c) - F(1) and its complement the negation; F is piecewise linear, so
/// the supremum sits on a breakpoint.
inline double signed_mixture_discrepancy(std::span<const std::pair<const StepLaw*, double>> terms) {
  double slope = 0.0;
  std::vector<std::pair<double, double>> jumps;
  for (const auto& [law, w] : terms) {
    slope += w * law->values.front();
    for (std::size_t k = 0; k < law->edges.size(); ++k)
      jumps.emplace_back(law->edges[k], w * (law->values[k + 1] - law->values[k]));
  }
  std::sort(jumps.begin(), jumps.end());

  std::vector<double> f_at{0.0};
  double pos = 0.0;
  double f = 0.0;
  for (const auto& [x, dj] : jumps) {
    f += slope * (x - pos);
    pos = x;
    slope += dj;
    f_at.push_back(f);
  }
  f += slope * (1.0 - pos);
  f_at.push_back(f);

  double best = 0.0;
  for (double fc : f_at) best = std::max(best, std::abs(2.0 * fc - f));
  return std::min(best, 1.0);
}

/// Binary scenario with uniform marginal and one StepLaw per time step.
class StepScenario : public BinaryScenario {
 public:
  explicit StepScenario(std::vector<StepLaw> laws) : BinaryScenario(laws.size()), laws_(std::move(laws)) {}

  [[nodiscard]] const StepLaw& law(std::size_t t) const { return laws_.at(t - 1); }

  [[nodiscard]] LabeledPoint sample(std::size_t t, CounterRng& rng) const override {
    const double x = rng.uniform();
    const double u = rng.uniform();
    return {x, u < law(t).prob_one(x) ? 1 : 0};
  }

  [[nodiscard]] double discrepancy(TimeRange a, TimeRange b) const override {
    check_range(a);
    check_range(b);
    std::vector<std::pair<const StepLaw*, double>> terms;
    terms.reserve(a.size() + b.size());
    const double wa = 1.0 / static_cast<double>(a.size());
    const double wb = 1.0 / static_cast<double>(b.size());
    for (std::size_t t = a.first; t <= a.last; ++t) terms.emplace_back(&law(t), wa);
    for (std::size_t t = b.first; t <= b.last; ++t) terms.emplace_back(&law(t), -wb);
    return signed_mixture_discrepancy(terms);
  }

  [[nodiscard]] double risk(const ThresholdHypothesis& h) const override { return laws_.back().risk(h); }
  [[nodiscard]] double best_risk() const override { return laws_.back().best_risk(); }

 private:
  std::vector<StepLaw> laws_;
};

namespace detail {

inline void check_noise(double eta) {
  if (!(eta >= 0.0 && eta < 0.5)) throw std::domain_error("scenario: eta must lie in [0, 0.5)");
}

// Label 1 at and above c, flipped with probability eta.
inline StepLaw noisy_threshold(double c, double eta) {
  return StepLaw::from_pieces({c}, [&](double x) { return x >= c ? 1.0 - eta : eta; });
}

}  // namespace detail

inline StepScenario gen_iid(const IidParams& p, std::size_t horizon) {
  if (!(p.c >= 0.0 && p.c <= 1.0)) throw std::domain_error("gen_iid: c must lie in [0,1]");
  detail::check_noise(p.eta);
  if (horizon == 0) throw std::domain_error("gen_iid: T must be >= 1");
  return StepScenario(std::vector<StepLaw>(horizon, detail::noisy_threshold(p.c, p.eta)));
}

/// Position x folded onto [0,1] by reflection at both ends.
inline double reflect_unit(double x) {
  double y = std::fmod(x, 2.0);
  if (y < 0.0) y += 2.0;
  return y <= 1.0 ? y : 2.0 - y;
}

/// Boundary at time T - lag: c0 - lag * step, reflected into [0,1].
inline double moving_boundary_at(const MovingBoundaryParams& p, std::size_t lag) {
  return reflect_unit(p.c0 - static_cast<double>(lag) * p.step);
}

/// Closed form of ||P_T - P_{T-lag}||: the disagreement region between the two
/// boundaries, scaled by the label margin 1 - 2 eta.
inline double moving_boundary_drift(const MovingBoundaryParams& p, std::size_t lag) {
  return (1.0 - 2.0 * p.eta) * std::abs(p.c0 - moving_boundary_at(p, lag));
}

inline StepScenario gen_moving_boundary(const MovingBoundaryParams& p, std::size_t horizon) {
  if (!(p.c0 >= 0.0 && p.c0 <= 1.0)) throw std::domain_error("gen_moving_boundary: c0 must lie in [0,1]");
  if (!(p.step >= 0.0) || !std::isfinite(p.step)) throw std::domain_error("gen_moving_boundary: step must be >= 0");
  detail::check_noise(p.eta);
  if (horizon == 0) throw std::domain_error("gen_moving_boundary: T must be >= 1");
  std::vector<StepLaw> laws;
  laws.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) laws.push_back(detail::noisy_threshold(moving_boundary_at(p, horizon - t), p.eta));
  return StepScenario(std::move(laws));
}

/// Noise-free labels on [0,1] that are 0 on I0 = [p0, p0 + Delta/2) and 1 on
/// I1 = [p1, p1 + Delta/2) at time T; going back in time, I0 is flipped at odd
/// lags and I1 at even lags >= 2.
inline StepScenario gen_alternating_intervals(const AlternatingParams& p, std::size_t horizon) {
  const double half = p.Delta / 2.0;
  if (!(p.Delta > 0.0)) throw std::domain_error("gen_alternating_intervals: Delta must be > 0");
  for (double start : {p.p0, p.p1})
    if (!(start >= 0.0 && start + half <= 1.0))
      throw std::domain_error("gen_alternating_intervals: intervals must lie inside [0,1]");
  if (p.p0 < p.p1 + half && p.p1 < p.p0 + half) throw std::domain_error("gen_alternating_intervals: intervals overlap");
  if (horizon == 0) throw std::domain_error("gen_alternating_intervals: T must be >= 1");

  // A threshold labeling that is 0 on I0 and 1 on I1.
  const auto label_at_t = [&](double x) {
    return p.p0 < p.p1 ? (x >= p.p1 ? 1 : 0) : (x < p.p1 + half ? 1 : 0);
  };
  const auto in = [&](double x, double start) { return x >= start && x < start + half; };
  const std::vector<double> breaks{p.p0, p.p0 + half, p.p1, p.p1 + half};

  std::vector<StepLaw> laws;
  laws.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const std::size_t lag = horizon - t;
    laws.push_back(StepLaw::from_pieces(breaks, [&](double x) {
      int label = label_at_t(x);
      const bool flip = (lag % 2 == 1 && in(x, p.p0)) || (lag >= 2 && lag % 2 == 0 && in(x, p.p1));
      if (flip) label = 1 - label;
      return static_cast<double>(label);
    }));
  }
  return StepScenario(std::move(laws));
}

// ---------------------------------------------------------------------------
// worst-case family over shatter points

/// Largest r with Delta_r < sqrt(nu / r); delta_seq holds Delta_1..Delta_T.
inline std::size_t compute_r_tilde(std::span<const double> delta_seq, std::size_t nu) {
  if (nu == 0) throw std::domain_error("compute_r_tilde: nu must be >= 1");
  if (delta_seq.empty()) throw std::domain_error("compute_r_tilde: empty sequence");
  for (std::size_t k = 0; k < delta_seq.size(); ++k) {
    if (!(delta_seq[k] >= 0.0)) throw std::domain_error("compute_r_tilde: Delta must be nonnegative");
    if (k > 0 && delta_seq[k] < delta_seq[k - 1]) throw std::domain_error("compute_r_tilde: Delta must be non-decreasing");
  }
  std::size_t r_tilde = 0;
  for (std::size_t r = 1; r <= delta_seq.size(); ++r)
    if (delta_seq[r - 1] < std::sqrt(static_cast<double>(nu) / static_cast<double>(r))) r_tilde = r;
  if (r_tilde == 0) throw std::domain_error("compute_r_tilde: no r satisfies Delta_r < sqrt(nu/r)");
  return r_tilde;
}

/// Phi(r) = sqrt(nu / r) + Delta_r.
inline double assouad_phi(std::span<const double> delta_seq, std::size_t nu, std::size_t r) {
  return std::sqrt(static_cast<double>(nu) / static_cast<double>(r)) + delta_seq[r - 1];
}

inline double assouad_phi_star(std::span<const double> delta_seq, std::size_t nu) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= delta_seq.size(); ++r) best = std::min(best, assouad_phi(delta_seq, nu, r));
  return best;
}

/// x uniform over nu atoms (i + 1/2) / nu. For t > T - r_tilde the label
/// probability at atom i is 1/2 + tau_i / (16 sqrt 6) * (Phi(r_tilde) -
/// Delta_{T-t+1}); earlier steps are pure noise.
///
/// Discrepancies are taken over the class of all labelings of the atoms,
/// which thresholds realize exactly when nu <= 2.
class AssouadScenario : public BinaryScenario {
 public:
  AssouadScenario(AssouadParams params, std::size_t horizon) : BinaryScenario(horizon), params_(std::move(params)) {
    const auto& p = params_;
    if (p.nu == 0) throw std::domain_error("gen_assouad: nu must be >= 1");
    if (p.delta_seq.size() != horizon) throw std::domain_error("gen_assouad: delta_seq must have T entries");
    if (p.delta_seq.front() != 0.0) throw std::domain_error("gen_assouad: Delta_1 must be 0");
    if (p.tau.size() != p.nu) throw std::domain_error("gen_assouad: tau must have nu entries");
    for (int s : p.tau)
      if (s != 1 && s != -1) throw std::domain_error("gen_assouad: tau entries must be +1 or -1");

    r_tilde_ = compute_r_tilde(p.delta_seq, p.nu);
    phi_star_ = assouad_phi_star(p.delta_seq, p.nu);
    if (!(phi_star_ < 1.0 / 3.0)) throw std::domain_error("gen_assouad: Phi* must be < 1/3");

    const double scale = 1.0 / (16.0 * std::sqrt(6.0));
    const double top = assouad_phi(p.delta_seq, p.nu, r_tilde_);
    bias_.assign(horizon, 0.0);
    for (std::size_t t = horizon - r_tilde_ + 1; t <= horizon; ++t)
      bias_[t - 1] = scale * (top - p.delta_seq[horizon - t]);
    for (std::size_t t = 1; t <= horizon; ++t)
      for (std::size_t i = 0; i < p.nu; ++i) {
        const double q = label_prob(t, i);
        if (!(q >= 0.25 && q <= 0.75)) throw std::domain_error("gen_assouad: label probability outside [1/4, 3/4]");
      }
  }

  [[nodiscard]] const AssouadParams& params() const { return params_; }
  [[nodiscard]] std::size_t r_tilde() const { return r_tilde_; }
  [[nodiscard]] double phi_star() const { return phi_star_; }

  [[nodiscard]] double point(std::size_t i) const {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(params_.nu);
  }

  [[nodiscard]] double label_prob(std::size_t t, std::size_t i) const {
    return 0.5 + params_.tau[i] * bias_.at(t - 1);
  }

  [[nodiscard]] LabeledPoint sample(std::size_t t, CounterRng& rng) const override {
    const auto i = std::min(params_.nu - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(params_.nu)));
    return {point(i), rng.uniform() < label_prob(t, i) ? 1 : 0};
  }

  [[nodiscard]] double discrepancy(TimeRange a, TimeRange b) const override {
    check_range(a);
    check_range(b);
    const double diff = mean_bias(a) - mean_bias(b);
    // sum_i (1/nu) |tau_i * diff| with |tau_i| = 1
    return std::abs(diff);
  }

  [[nodiscard]] double risk(const ThresholdHypothesis& h) const override {
    const std::size_t horizon = this->horizon();
    double acc = 0.0;
    for (std::size_t i = 0; i < params_.nu; ++i) {
      const double q = label_prob(horizon, i);
      acc += h.predict(point(i)) == 1 ? 1.0 - q : q;
    }
    return acc / static_cast<double>(params_.nu);
  }

  [[nodiscard]] double best_risk() const override {
    double best = 1.0;
    std::vector<double> cutoffs{0.0, 1.0};
    for (std::size_t i = 0; i < params_.nu; ++i) cutoffs.push_back(point(i));
    for (double c : cutoffs)
      for (Orientation o : {Orientation::GeqIsOne, Orientation::LtIsOne}) best = std::min(best, risk({c, o}));
    return best;
  }

 private:
  [[nodiscard]] double mean_bias(TimeRange r) const {
    double s = 0.0;
    for (std::size_t t = r.first; t <= r.last; ++t) s += bias_[t - 1];
    return s / static_cast<double>(r.size());
  }

  AssouadParams params_;
  std::size_t r_tilde_ = 1;
  double phi_star_ = 0.0;
  std::vector<double> bias_;  // per time step, before the sign tau_i
};

inline AssouadScenario gen_assouad(AssouadParams p, std::size_t horizon) { return AssouadScenario(std::move(p), horizon); }

/// Builds the binary scenario described by a spec (every kind except the
/// regression rotation).
inline std::unique_ptr<BinaryScenario> make_binary_scenario(const ScenarioSpec& spec) {
  switch (spec.kind()) {
    case ScenarioKind::IID:
      return std::make_unique<StepScenario>(gen_iid(std::get<IidParams>(spec.params), spec.T));
    case ScenarioKind::MovingBoundary:
      return std::make_unique<StepScenario>(gen_moving_boundary(std::get<MovingBoundaryParams>(spec.params), spec.T));
    case ScenarioKind::AlternatingIntervals:
      return std::make_unique<StepScenario>(gen_alternating_intervals(std::get<AlternatingParams>(spec.params), spec.T));
    case ScenarioKind::AssouadFamily:
      return std::make_unique<AssouadScenario>(std::get<AssouadParams>(spec.params), spec.T);
    case ScenarioKind::RegressionRotation:
      break;
  }
  throw std::domain_error("make_binary_scenario: not a binary scenario");
}

}  // namespace adaptwin
