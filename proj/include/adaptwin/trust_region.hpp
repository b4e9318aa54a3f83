#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "adaptwin/eigen_sym.hpp"

namespace adaptwin {

/// Global minimizer of w^T A w - 2 b^T w over the closed unit ball.
///
/// `multiplier` is the KKT multiplier: (A + multiplier I) w = b, with
/// multiplier = 0 for interior solutions.
struct TrustRegionSolution {
  Eigen::VectorXd w;
  double value = 0.0;
  double multiplier = 0.0;
  bool boundary = false;
};

inline double quadratic_objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
  return w.dot(a * w) - 2.0 * b.dot(w);
}

namespace detail {

// Flip v so that its first significant coordinate is positive.
inline Eigen::VectorXd lexicographic_orient(Eigen::VectorXd v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-12) {
      if (v(k) < 0.0) v = -v;
      break;
    }
  }
  return v;
}

struct SecularTerms {
  const Eigen::VectorXd& lambdas;
  const Eigen::VectorXd& beta;
  const std::vector<bool>& skip;

  // ||w(mu)||^2 and its derivative in mu.
  [[nodiscard]] std::pair<double, double> norm_sq(double mu) const {
    double s = 0.0;
    double ds = 0.0;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      if (skip[static_cast<std::size_t>(i)] || beta(i) == 0.0) continue;
      const double den = lambdas(i) + mu;
      if (den <= 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
      const double t = beta(i) / den;
      s += t * t;
      ds -= 2.0 * t * t / den;
    }
    return {s, ds};
  }

  [[nodiscard]] Eigen::VectorXd coords(double mu) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(beta.size());
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      if (skip[static_cast<std::size_t>(i)] || beta(i) == 0.0) continue;
      c(i) = beta(i) / (lambdas(i) + mu);
    }
    return c;
  }
};

// Solves ||w(mu)|| = 1 for mu in (lo, hi] by Newton on 1/||w|| - 1, falling
// back to bisection whenever the step leaves the bracket.
inline double solve_secular(const SecularTerms& terms, double lo, double hi) {
  double a = lo;
  double b = hi;
  double mu = hi;
  for (int iter = 0; iter < 500; ++iter) {
    const auto [s, ds] = terms.norm_sq(mu);
    const double norm = std::sqrt(s);
    if (std::isfinite(norm) && std::abs(norm - 1.0) <= 1e-12) return mu;
    if (!std::isfinite(norm) || norm > 1.0) {
      a = mu;
    } else {
      b = mu;
    }
    double next = 0.5 * (a + b);
    if (std::isfinite(norm) && norm > 0.0 && ds < 0.0) {
      // psi = 1/norm - 1, psi' = -ds / (2 norm^3)
      const double psi = 1.0 / norm - 1.0;
      const double dpsi = -ds / (2.0 * norm * s);
      const double newton = mu - psi / dpsi;
      if (newton > a && newton < b) next = newton;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b))) return b;
    mu = next;
  }
  return mu;
}

}  // namespace detail

/// Minimizes w^T A w - 2 b^T w subject to ||w|| <= 1 for symmetric A.
///
/// Uses the eigendecomposition of A: an interior stationary point when A is
/// positive semidefinite and the least-norm solution of A w = b is feasible;
/// otherwise the multiplier solving ||(A + mu I)^{-1} b|| = 1 on
/// mu > max(0, -lambda_min). When b is orthogonal to the bottom eigenspace
/// (|q^T b| <= 1e-12 ||b||) and the remaining components fit inside the ball,
/// mu = -lambda_min and a bottom eigenvector is added to reach the sphere.
inline TrustRegionSolution trust_region_min(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  require_symmetric(a, "trust_region_min");
  if (a.rows() != b.size()) throw std::domain_error("trust_region_min: dimension mismatch");
  if (a.rows() == 0) throw std::domain_error("trust_region_min: empty problem");

  const EigenDecomposition eig = symmetric_eig(a);
  const Eigen::VectorXd& lambdas = eig.lambdas;
  const Eigen::VectorXd beta = eig.q.transpose() * b;
  const Eigen::Index n = lambdas.size();
  const double lambda_min = lambdas(0);
  const double scale = std::max(1.0, lambdas.cwiseAbs().maxCoeff());
  const double b_norm = b.norm();

  std::vector<bool> bottom(static_cast<std::size_t>(n), false);
  bool orthogonal_to_bottom = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambdas(i) <= lambda_min + 1e-10 * scale) {
      bottom[static_cast<std::size_t>(i)] = true;
      if (std::abs(beta(i)) > 1e-12 * b_norm) orthogonal_to_bottom = false;
    }
  }

  const double lo = std::max(0.0, -lambda_min);
  const std::vector<bool> keep_all(static_cast<std::size_t>(n), false);
  const std::vector<bool>& skip = orthogonal_to_bottom ? bottom : keep_all;
  const detail::SecularTerms terms{lambdas, beta, skip};

  auto finish = [&](const Eigen::VectorXd& coords, double mu, bool on_boundary) {
    TrustRegionSolution sol;
    sol.w = eig.q * coords;
    sol.value = quadratic_objective(a, b, sol.w);
    sol.multiplier = mu;
    sol.boundary = on_boundary;
    return sol;
  };

  const double s_lo = terms.norm_sq(lo).first;
  const bool fits_at_lo = std::isfinite(s_lo) && std::sqrt(s_lo) <= 1.0;

  if (fits_at_lo) {
    if (lo == 0.0) return finish(terms.coords(0.0), 0.0, false);
    // Hard case: the remaining components sit inside the ball; column 0 spans
    // the exact bottom eigenvalue and carries no component of b.
    Eigen::VectorXd coords = terms.coords(lo);
    const double tail = std::sqrt(std::max(0.0, 1.0 - coords.squaredNorm()));
    const Eigen::VectorXd direction = detail::lexicographic_orient(eig.q.col(0));
    coords += tail * (eig.q.transpose() * direction);
    return finish(coords, lo, true);
  }

  const double mu = detail::solve_secular(terms, lo, lo + b_norm + 1.0);
  return finish(terms.coords(mu), mu, true);
}

}  // namespace adaptwin
