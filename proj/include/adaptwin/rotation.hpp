#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adaptwin/linear.hpp"
#include "adaptwin/random.hpp"
#include "adaptwin/scenario.hpp"

namespace adaptwin {

/// First two moments of clip(m + sigma Z, -1, 1) for standard normal Z.
struct ClippedMoments {
  double mean = 0.0;
  double second = 0.0;
};

inline ClippedMoments clipped_gaussian_moments(double m, double sigma) {
  if (sigma == 0.0) {
    const double c = std::clamp(m, -1.0, 1.0);
    return {c, c * c};
  }
  const auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  const auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };
  const double a = (-1.0 - m) / sigma;
  const double b = (1.0 - m) / sigma;
  const double fa = cdf(a);
  const double fb = cdf(b);
  const double pa = pdf(a);
  const double pb = pdf(b);
  const double inside = fb - fa;
  // Mass below a sits at -1, mass above b at +1.
  const double mean = -fa + (1.0 - fb) + m * inside + sigma * (pa - pb);
  const double second = fa + (1.0 - fb) + m * m * inside + 2.0 * m * sigma * (pa - pb) +
                        sigma * sigma * (inside + a * pa - b * pb);
  return {mean, second};
}

/// Linear regression target rotating in the plane: x uniform on the unit
/// circle, y = clip(<x, w_t> + sigma z, -1, 1), with w_{T-s} = R(-s theta) w0.
///
/// Squared-loss quantities over the unit-ball linear class reduce to two
/// rotation-invariant constants, kappa = E[y <x, w_t>] and mu = E[y^2]:
///   E_t[y x] = kappa w_t,  E[x x^T] = I/2,
/// so the discrepancy between two window averages is 2 kappa ||avg w_A - avg w_B||
/// and P_T(L_w) = mu - 2 kappa <w, w_T> + ||w||^2 / 2. The constants come from
/// trapezoid quadrature over the angle; `tolerance()` is the change between
/// the last two refinements.
class RotationScenario {
 public:
  RotationScenario(const RotationParams& p, std::size_t horizon) : params_(p), horizon_(horizon) {
    if (horizon == 0) throw std::domain_error("gen_regression_rotation: T must be >= 1");
    const double norm = std::hypot(p.w0[0], p.w0[1]);
    if (!(std::abs(norm - 1.0) <= 1e-9)) throw std::domain_error("gen_regression_rotation: w0 must be a unit vector");
    if (!(p.theta >= 0.0) || !std::isfinite(p.theta)) throw std::domain_error("gen_regression_rotation: theta must be >= 0");
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) throw std::domain_error("gen_regression_rotation: sigma must be >= 0");

    const auto coarse = quadrature(1024);
    const auto fine = quadrature(4096);
    kappa_ = fine.first;
    mu_ = fine.second;
    tolerance_ = std::max(std::abs(fine.first - coarse.first), std::abs(fine.second - coarse.second));

    targets_.resize(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) {
      const double angle = -static_cast<double>(horizon - t) * p.theta;
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      targets_[t - 1] = {c * p.w0[0] - s * p.w0[1], s * p.w0[0] + c * p.w0[1]};
    }
  }

  [[nodiscard]] std::size_t horizon() const { return horizon_; }
  [[nodiscard]] const RotationParams& params() const { return params_; }
  [[nodiscard]] double kappa() const { return kappa_; }
  [[nodiscard]] double mu() const { return mu_; }
  [[nodiscard]] double tolerance() const { return tolerance_; }

  [[nodiscard]] Eigen::Vector2d target(std::size_t t) const {
    const auto& w = targets_.at(t - 1);
    return {w[0], w[1]};
  }

  [[nodiscard]] RegressionPoint sample(std::size_t t, CounterRng& rng) const {
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    Eigen::VectorXd x(2);
    x << std::cos(phi), std::sin(phi);
    double y = x.dot(target(t));
    if (params_.sigma > 0.0) y += params_.sigma * rng.normal();
    return {std::move(x), std::clamp(y, -1.0, 1.0)};
  }

  [[nodiscard]] std::vector<RegressionPoint> stream(std::uint64_t key) const {
    std::vector<RegressionPoint> out;
    out.reserve(horizon_);
    for (std::size_t t = 1; t <= horizon_; ++t) {
      CounterRng rng(key, t);
      out.push_back(sample(t, rng));
    }
    return out;
  }

  [[nodiscard]] double discrepancy(TimeRange a, TimeRange b) const {
    return 2.0 * kappa_ * (mean_target(a) - mean_target(b)).norm();
  }

  [[nodiscard]] double drift(std::size_t lag) const {
    if (lag >= horizon_) throw std::domain_error("drift: lag must be < T");
    if (lag == 0) return 0.0;
    return discrepancy(TimeRange::at(horizon_ - lag), TimeRange::at(horizon_));
  }

  [[nodiscard]] double risk(const Eigen::VectorXd& w) const {
    if (w.size() != 2) throw std::domain_error("RotationScenario::risk: expected a 2-vector");
    return mu_ - 2.0 * kappa_ * w.dot(target(horizon_)) + 0.5 * w.squaredNorm();
  }

  /// Attained at w = 2 kappa w_T, which lies in the unit ball since kappa <= 1/2.
  [[nodiscard]] double best_risk() const { return mu_ - 2.0 * kappa_ * kappa_; }

 private:
  [[nodiscard]] std::pair<double, double> quadrature(int n) const {
    double k = 0.0;
    double m = 0.0;
    for (int j = 0; j < n; ++j) {
      const double c = std::cos(2.0 * std::numbers::pi * j / n);
      const auto mom = clipped_gaussian_moments(c, params_.sigma);
      k += c * mom.mean;
      m += mom.second;
    }
    return {k / n, m / n};
  }

  [[nodiscard]] Eigen::Vector2d mean_target(TimeRange r) const {
    if (r.first < 1 || r.first > r.last || r.last > horizon_)
      throw std::domain_error("scenario: time range outside [1, T]");
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (std::size_t t = r.first; t <= r.last; ++t) acc += target(t);
    return acc / static_cast<double>(r.size());
  }

  RotationParams params_;
  std::size_t horizon_;
  double kappa_ = 0.0;
  double mu_ = 0.0;
  double tolerance_ = 0.0;
  std::vector<std::array<double, 2>> targets_;
};

inline RotationScenario gen_regression_rotation(const RotationParams& p, std::size_t horizon) {
  return RotationScenario(p, horizon);
}

}  // namespace adaptwin
