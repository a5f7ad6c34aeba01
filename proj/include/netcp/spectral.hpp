#pragma once

// Operator norm of symmetric matrices. For symmetric M the 2->2 norm is
// max_i |lambda_i(M)|, which Lanczos recovers from the extreme Ritz values.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "netcp/errors.hpp"
#include "netcp/graph_core.hpp"
#include "netcp/rng.hpp"

namespace netcp {

struct SpectralConfig {
  double rel_tol = 1e-10;
  int max_iter = 5000;
  int restarts = 3;
  std::uint64_t seed = 0x5eed;

  void validate() const {
    detail::require(rel_tol > 0.0, "SpectralConfig: rel_tol must be > 0");
    detail::require(max_iter >= 1, "SpectralConfig: max_iter must be >= 1");
    detail::require(restarts >= 1, "SpectralConfig: restarts must be >= 1");
  }
};

namespace detail {

inline Vector random_unit_vector(Eigen::Index n, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v / v.norm();
}

struct LanczosOutcome {
  double value = 0.0;
  bool converged = false;
};

// Lanczos with full (two-pass) reorthogonalization. On breakdown the
// recursion is restarted with a fresh random direction orthogonal to the
// basis (zero coupling), so after n steps the whole space is covered.
inline LanczosOutcome lanczos_abs_max(const Matrix& m, const SpectralConfig& cfg, Rng& rng) {
  const Eigen::Index n = m.rows();
  const Eigen::Index steps = std::min<Eigen::Index>(n, cfg.max_iter);
  const double scale = m.cwiseAbs().maxCoeff() * static_cast<double>(n);

  Matrix basis(n, steps);
  Vector alpha(steps), beta(steps);
  Vector v = random_unit_vector(n, rng);
  LanczosOutcome out;
  bool coupled = true;  // false right after a breakdown restart

  Eigen::SelfAdjointEigenSolver<Matrix> tri;
  for (Eigen::Index k = 0; k < steps; ++k) {
    basis.col(k) = v;
    Vector w = m * v;
    alpha(k) = v.dot(w);
    w -= alpha(k) * v;
    if (k > 0 && coupled) w -= beta(k - 1) * basis.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = basis.leftCols(k + 1);
      w -= q * (q.transpose() * w);
    }
    beta(k) = w.norm();
    const bool last = (k + 1 == steps);
    const bool breakdown = beta(k) <= 1e-13 * scale;

    if (last || breakdown || (k + 1) % 4 == 0) {
      const Eigen::Index dim = k + 1;
      Vector sub = beta.head(dim).eval();
      sub.conservativeResize(std::max<Eigen::Index>(dim - 1, 0));
      tri.computeFromTridiagonal(alpha.head(dim), sub, Eigen::ComputeEigenvectors);
      const Vector& theta = tri.eigenvalues();
      Eigen::Index idx = 0;
      theta.cwiseAbs().maxCoeff(&idx);
      out.value = std::abs(theta(idx));
      const double residual = std::abs(beta(k) * tri.eigenvectors()(dim - 1, idx));
      if (dim == n) {
        out.converged = true;
        return out;
      }
      if (!breakdown && residual <= cfg.rel_tol * std::max(out.value, 1e-300)) {
        out.converged = true;
        return out;
      }
    }
    if (last) break;

    if (breakdown) {
      beta(k) = 0.0;
      Vector fresh = random_unit_vector(n, rng);
      for (int pass = 0; pass < 2; ++pass) {
        const auto q = basis.leftCols(k + 1);
        fresh -= q * (q.transpose() * fresh);
      }
      v = fresh / fresh.norm();
      coupled = false;
    } else {
      v = w / beta(k);
      coupled = true;
    }
  }
  return out;
}

// Power iteration on M^2; its dominant eigenvalue is max|lambda|^2, which
// removes the +/- lambda ambiguity of plain power iteration.
inline LanczosOutcome power_abs_max(const Matrix& m, const SpectralConfig& cfg, Rng& rng) {
  Vector v = random_unit_vector(m.rows(), rng);
  LanczosOutcome out;
  double prev = 0.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    Vector w = m * (m * v);
    const double lambda_sq = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    v = w / norm;
    out.value = std::sqrt(std::max(lambda_sq, 0.0));
    if (it > 0 && std::abs(lambda_sq - prev) <= cfg.rel_tol * lambda_sq) {
      out.converged = true;
      return out;
    }
    prev = lambda_sq;
  }
  return out;
}

inline double max_asymmetry(const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace detail

/// Operator norm max_i |lambda_i(M)| of a symmetric matrix.
///
/// Takes the maximum over `restarts` seeded random starts. Throws
/// validation_error on asymmetric or non-finite input and convergence_error
/// (carrying the best estimate) if no start converges.
inline double op_norm(const Matrix& m, const SpectralConfig& cfg = {}) {
  cfg.validate();
  detail::require(m.rows() == m.cols(), "op_norm: matrix must be square");
  if (m.size() == 0) return 0.0;
  detail::require(m.allFinite(), "op_norm: non-finite entries");
  detail::require(detail::max_asymmetry(m) <= 1e-12, "op_norm: matrix is not symmetric");
  if (m.norm() == 0.0) return 0.0;

  Rng rng(cfg.seed);
  double best = 0.0;
  bool any_converged = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    auto res = detail::lanczos_abs_max(m, cfg, rng);
    if (!res.converged) {
      const auto fallback = detail::power_abs_max(m, cfg, rng);
      if (fallback.converged) res = fallback;
      else res.value = std::max(res.value, fallback.value);
    }
    best = std::max(best, res.value);
    any_converged = any_converged || res.converged;
  }
  if (!any_converged) {
    throw convergence_error("op_norm: no restart converged within max_iter", best);
  }
  return best;
}

/// Number of singular values greater than tol * (largest singular value).
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m, double tol = 1e-8) {
  detail::require(tol >= 0.0, "numerical_rank: tol must be >= 0");
  if (m.size() == 0) return 0;
  const Matrix dense = m.template cast<double>();
  detail::require(dense.allFinite(), "numerical_rank: non-finite entries");
  Eigen::BDCSVD<Matrix> svd(dense);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

}  // namespace netcp
