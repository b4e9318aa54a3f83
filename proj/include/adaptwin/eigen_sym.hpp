#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace adaptwin {

/// A = Q diag(lambdas) Q^T with lambdas ascending and Q orthogonal.
struct EigenDecomposition {
  Eigen::MatrixXd q;
  Eigen::VectorXd lambdas;
};

inline constexpr Eigen::Index kMaxDimension = 64;

inline void require_symmetric(const Eigen::MatrixXd& a, const char* who) {
  if (a.rows() != a.cols()) throw std::domain_error(std::string(who) + ": matrix is not square");
  if (!a.allFinite()) throw std::domain_error(std::string(who) + ": matrix has non-finite entries");
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::domain_error(std::string(who) + ": matrix is not symmetric");
}

/// Cyclic Jacobi eigensolver for small dense symmetric matrices.
///
/// Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius mass
/// drops to 1e-14 * ||A||_F.
inline EigenDecomposition symmetric_eig(const Eigen::MatrixXd& input) {
  require_symmetric(input, "symmetric_eig");
  const Eigen::Index n = input.rows();
  if (n > kMaxDimension) throw std::domain_error("symmetric_eig: dimension exceeds 64");

  Eigen::MatrixXd a = (input + input.transpose()) / 2.0;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  const double frob = a.norm();
  auto off_mass = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_mass() > 1e-14 * frob; ++sweep) {
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle from the classic stable formulation (tangent of the smaller root).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition out{Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.lambdas(k) = a(order[k], order[k]);
    out.q.col(k) = v.col(order[k]);
  }
  return out;
}

}  // namespace adaptwin
