#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "adaptwin/trust_region.hpp"

namespace adaptwin {

/// Feature vector in the closed unit ball with a target in [-1, 1].
struct RegressionPoint {
  Eigen::VectorXd x;
  double y = 0.0;
};

inline void validate(const RegressionPoint& p) {
  if (!(p.x.norm() <= 1.0 + 1e-12)) throw std::domain_error("RegressionPoint: ||x|| must be <= 1");
  if (!(p.y >= -1.0 && p.y <= 1.0)) throw std::domain_error("RegressionPoint: y must lie in [-1,1]");
}

/// Unnormalized recent-minus-older moment sums:
///   a = sum_recent y^2 - sum_older y^2
///   b = sum_older y x - sum_recent y x
///   A = sum_recent x x^T - sum_older x x^T
/// A is kept as its packed upper triangle, so it is symmetric by construction.
class WindowMoments {
 public:
  WindowMoments(std::size_t window, Eigen::Index dim)
      : r_(window), dim_(dim), b_(Eigen::VectorXd::Zero(dim)), packed_(static_cast<std::size_t>(dim * (dim + 1) / 2), 0.0) {}

  [[nodiscard]] std::size_t r() const { return r_; }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] const Eigen::VectorXd& b() const { return b_; }

  [[nodiscard]] double at(Eigen::Index i, Eigen::Index j) const {
    if (i > j) std::swap(i, j);
    return packed_[index(i, j)];
  }

  [[nodiscard]] Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(dim_, dim_);
    for (Eigen::Index i = 0; i < dim_; ++i)
      for (Eigen::Index j = i; j < dim_; ++j) m(i, j) = m(j, i) = packed_[index(i, j)];
    return m;
  }

  /// Adds a point with weight +1 (recent window) or -1 (older window).
  void accumulate(const RegressionPoint& p, double sign) {
    a_ += sign * p.y * p.y;
    b_ -= sign * p.y * p.x;
    for (Eigen::Index i = 0; i < dim_; ++i)
      for (Eigen::Index j = i; j < dim_; ++j) packed_[index(i, j)] += sign * p.x(i) * p.x(j);
  }

 private:
  [[nodiscard]] std::size_t index(Eigen::Index i, Eigen::Index j) const {
    // row-major upper triangle
    return static_cast<std::size_t>(i * dim_ - i * (i - 1) / 2 + (j - i));
  }

  std::size_t r_;
  Eigen::Index dim_;
  double a_ = 0.0;
  Eigen::VectorXd b_;
  std::vector<double> packed_;
};

inline WindowMoments window_moments(std::span<const RegressionPoint> recent, std::span<const RegressionPoint> older) {
  if (recent.empty() || recent.size() != older.size())
    throw std::domain_error("window_moments: windows must be non-empty and of equal size");
  const Eigen::Index dim = recent.front().x.size();
  if (dim == 0 || dim > kMaxDimension) throw std::domain_error("window_moments: dimension must be in [1,64]");
  WindowMoments m(recent.size(), dim);
  for (const auto& p : recent) {
    if (p.x.size() != dim) throw std::domain_error("window_moments: dimension mismatch");
    m.accumulate(p, +1.0);
  }
  for (const auto& p : older) {
    if (p.x.size() != dim) throw std::domain_error("window_moments: dimension mismatch");
    m.accumulate(p, -1.0);
  }
  return m;
}

/// Empirical discrepancy for squared loss over the unit-ball linear class:
/// (1/(2r)) sup_{||w|| <= 1} |g(w)| with g(w) = a + w^T A w + 2 b^T w, the
/// recent-minus-older difference of squared-loss sums. The two one-sided
/// suprema are trust-region problems:
///   sup g  = a - min [w^T (-A) w - 2 b^T w]
///   sup -g = -a - min [w^T A w - 2 (-b)^T w]
inline double discrepancy_linear(const WindowMoments& m) {
  const Eigen::MatrixXd a = m.matrix();
  const double sup_g = m.a() - trust_region_min(-a, m.b()).value;
  const double sup_neg_g = -m.a() - trust_region_min(a, -m.b()).value;
  return std::max(0.0, std::max(sup_g, sup_neg_g)) / (2.0 * static_cast<double>(m.r()));
}

inline double discrepancy_linear(std::span<const RegressionPoint> recent, std::span<const RegressionPoint> older) {
  return discrepancy_linear(window_moments(recent, older));
}

struct LinearFit {
  Eigen::VectorXd w;
  double risk = 0.0;  // total squared loss over the window
};

/// Least squares over the unit ball: minimizes sum (y - <x, w>)^2 as the
/// trust-region problem with A = sum x x^T, b = sum y x; the constant
/// sum y^2 is added back to report the loss.
inline LinearFit fit_linear(std::span<const RegressionPoint> window) {
  if (window.empty()) throw std::domain_error("fit_linear: empty window");
  const Eigen::Index dim = window.front().x.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  double yy = 0.0;
  for (const auto& p : window) {
    if (p.x.size() != dim) throw std::domain_error("fit_linear: dimension mismatch");
    a.selfadjointView<Eigen::Upper>().rankUpdate(p.x);
    b += p.y * p.x;
    yy += p.y * p.y;
  }
  a = a.selfadjointView<Eigen::Upper>();
  const TrustRegionSolution sol = trust_region_min(a, b);
  return {sol.w, std::max(0.0, yy + sol.value)};
}

}  // namespace adaptwin
