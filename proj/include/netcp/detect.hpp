#pragma once

// Change-point tests on the spectral norm of the Matrix CUSUM: a test at a
// known location, the dyadic-grid test (optionally with the midpoint added),
// and the full-grid test, plus their thresholds, the energy-to-noise ratio,
// the reported detection boundaries and the missing-link distortion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "netcp/cusum.hpp"
#include "netcp/errors.hpp"
#include "netcp/graph_core.hpp"
#include "netcp/spectral.hpp"

namespace netcp {

/// Absolute constant of the matrix Bernstein bound for the CUSUM noise.
inline const double bernstein_constant = 1.0 + std::sqrt(3.0);

// ---------------------------------------------------------------------------
// Grids

/// {2^k} ∪ {T - 2^k} for k = 0..floor(log2(T/2)), sorted and deduplicated.
inline std::vector<int> dyadic_grid(int T) {
  detail::require(T >= 2, "dyadic_grid: T must be >= 2");
  std::set<int> pts;
  for (long long p = 1; 2 * p <= T; p *= 2) {
    pts.insert(static_cast<int>(p));
    pts.insert(static_cast<int>(T - p));
  }
  return {pts.begin(), pts.end()};
}

/// Dyadic grid with floor(T/2) added.
inline std::vector<int> dyadic_grid_with_midpoint(int T) {
  auto g = dyadic_grid(T);
  const int mid = T / 2;
  if (std::find(g.begin(), g.end(), mid) == g.end()) {
    g.push_back(mid);
    std::sort(g.begin(), g.end());
  }
  return g;
}

// ---------------------------------------------------------------------------
// Thresholds

/// Bernstein-based threshold for the test at a known tau.
inline double threshold_practical_known_tau(double alpha, int n, int T, int tau, double kappa) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  detail::require(n >= 1, "n must be >= 1");
  detail::require(tau >= 1 && tau <= T - 1, "tau must lie in {1..T-1}");
  detail::require(kappa > 0.0, "kappa must be > 0");
  const double log_term = std::log(n / alpha);
  const double lead = log_term / (3.0 * std::sqrt(static_cast<double>(T)) * q_weight(static_cast<double>(tau) / T));
  return lead + std::sqrt(lead * lead + 2.0 * kappa * log_term);
}

/// Threshold at grid point t for a grid of the given size. The union-bound
/// factor |grid| enters the two leading terms only; the variance term keeps
/// 2 kappa log(n/alpha) as in the published simulation recipe.
inline double threshold_practical_grid(double alpha, int n, int T, int t, int grid_size, double kappa) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  detail::require(n >= 1, "n must be >= 1");
  detail::require(t >= 1 && t <= T - 1, "t must lie in {1..T-1}");
  detail::require(grid_size >= 1, "grid_size must be >= 1");
  detail::require(kappa > 0.0, "kappa must be > 0");
  const double grid_log = std::log(n * static_cast<double>(grid_size) / alpha);
  const double lead = grid_log / (3.0 * std::sqrt(static_cast<double>(T)) * q_weight(static_cast<double>(t) / T));
  return lead + std::sqrt(lead * lead + 2.0 * kappa * std::log(n / alpha));
}

struct KnownLocation {};
struct GridOverTime {
  int T;
};

/// c* sqrt(kappa log(n/alpha)) at a known location, or
/// c* sqrt(omega log(2 n log2(T) / alpha)) over the dyadic grid.
inline double threshold_theoretical(double alpha, int n, double sparsity,
                                    std::variant<KnownLocation, GridOverTime> variant) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  detail::require(n >= 1 && sparsity > 0.0, "n and sparsity must be positive");
  if (std::holds_alternative<KnownLocation>(variant)) {
    return bernstein_constant * std::sqrt(sparsity * std::log(n / alpha));
  }
  const int T = std::get<GridOverTime>(variant).T;
  detail::require(T >= 2, "T must be >= 2");
  return bernstein_constant * std::sqrt(sparsity * std::log(2.0 * n * std::log2(static_cast<double>(T)) / alpha));
}

// ---------------------------------------------------------------------------
// Reporting helpers

/// Energy-to-noise ratio q(tau/T) ||dTheta|| / sqrt(kappa/T).
inline double enr(double delta_theta_norm, int tau, int T, double kappa) {
  detail::require(kappa > 0.0, "enr: kappa must be > 0");
  detail::require(tau >= 1 && tau <= T - 1, "enr: tau must lie in {1..T-1}");
  return q_weight(static_cast<double>(tau) / T) * delta_theta_norm / std::sqrt(kappa / T);
}

/// log^{1/4}(1 + eta^2) / (4 sqrt 2) with eta = 1 - alpha - beta.
inline double lower_bound_constant(double alpha, double beta) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  detail::require(beta >= 0.0 && beta <= 1.0 - alpha, "beta must lie in [0, 1-alpha]");
  const double eta = 1.0 - alpha - beta;
  return std::pow(std::log1p(eta * eta), 0.25) / (4.0 * std::sqrt(2.0));
}

struct BoundaryKnownLocation {
  int tau;
  double kappa;
};
struct BoundaryGrid {};

/// Upper detection boundary on the jump energy. Known location:
///   c* sqrt(kappa/T) (sqrt(log(n/alpha)) + sqrt(log(n/beta)));
/// dyadic grid:
///   sqrt(3) c* sqrt(omega/T) (sqrt(log(2n/alpha) + log log2 T) + sqrt(log(n/beta))).
inline double theoretical_boundary(double alpha, double beta, int n, int T, double omega,
                                   std::variant<BoundaryKnownLocation, BoundaryGrid> variant) {
  detail::require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0, "levels must lie in (0,1)");
  detail::require(n >= 1 && T >= 2, "need n >= 1 and T >= 2");
  const double tail = std::sqrt(std::log(n / beta));
  if (const auto* p1 = std::get_if<BoundaryKnownLocation>(&variant)) {
    detail::require(p1->kappa > 0.0, "kappa must be > 0");
    return bernstein_constant * std::sqrt(p1->kappa / T) * (std::sqrt(std::log(n / alpha)) + tail);
  }
  detail::require(omega > 0.0, "omega must be > 0");
  const double head = std::sqrt(std::log(2.0 * n / alpha) + std::log(std::log2(static_cast<double>(T))));
  return std::sqrt(3.0) * bernstein_constant * std::sqrt(omega / T) * (head + tail);
}

struct Distortion {
  double min_pi;
  int rank;
  double delta;
};

/// min Pi_ij / sqrt(max(rank(Pi ⊙ Theta), 1)).
inline Distortion distortion(const ProbMatrix& pi, const Matrix& theta_product, double tol = 1e-8) {
  detail::require(pi.mode() == ProbMatrix::Mode::sampling, "distortion: Pi must be a sampling matrix");
  detail::require(theta_product.rows() == pi.n() && theta_product.cols() == pi.n(),
                  "distortion: dimension mismatch");
  const double min_pi = pi.min_off_diagonal();
  detail::require(min_pi > 0.0, "distortion: min Pi_ij must be > 0");
  const int r = numerical_rank(theta_product, tol);
  return {min_pi, r, min_pi / std::sqrt(static_cast<double>(std::max(r, 1)))};
}

// ---------------------------------------------------------------------------
// Tests

namespace grid {
struct KnownTau {
  int tau;
};
struct Dyadic {};
struct DyadicMid {};
struct Full {};
}  // namespace grid
using GridKind = std::variant<grid::KnownTau, grid::Dyadic, grid::DyadicMid, grid::Full>;

enum class ThresholdKind { theoretical, practical };

namespace sparsity {
struct Known {
  double value;
};
struct EstimateKappa {
  double level = 0.9;
};
struct EstimateOmega {};
}  // namespace sparsity
using SparsityChoice = std::variant<sparsity::Known, sparsity::EstimateKappa, sparsity::EstimateOmega>;

struct TestConfig {
  double alpha = 0.05;
  GridKind grid = grid::Dyadic{};
  ThresholdKind threshold = ThresholdKind::practical;
  SparsityChoice sparsity = sparsity::EstimateKappa{};
  SpectralConfig spectral{};
};

struct TestStat {
  int t;
  double norm;
  double threshold;
};

struct TestVerdict {
  bool reject = false;
  std::vector<TestStat> stats;
  std::optional<int> argmax_t;
  double sparsity_used = 0.0;

  /// max_t ||Z_T(t)|| over the tested grid.
  double max_norm() const {
    double m = 0.0;
    for (const auto& s : stats) m = std::max(m, s.norm);
    return m;
  }
};

/// Time points examined by a grid kind.
inline std::vector<int> grid_points(const GridKind& kind, int T) {
  detail::require(T >= 2, "T must be >= 2");
  return std::visit(
      [T](const auto& g) -> std::vector<int> {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, grid::KnownTau>) {
          detail::require(g.tau >= 1 && g.tau <= T - 1, "known tau must lie in {1..T-1}");
          return {g.tau};
        } else if constexpr (std::is_same_v<G, grid::Dyadic>) {
          return dyadic_grid(T);
        } else if constexpr (std::is_same_v<G, grid::DyadicMid>) {
          return dyadic_grid_with_midpoint(T);
        } else {
          return full_grid(T);
        }
      },
      kind);
}

template <typename Scalar>
double resolve_sparsity(const SparsityChoice& choice, const BasicNetwork<Scalar>& net) {
  return std::visit(
      [&net](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, sparsity::Known>) return c.value;
        else if constexpr (std::is_same_v<C, sparsity::EstimateKappa>) return estimate_kappa(net, c.level);
        else return estimate_omega(net);
      },
      choice);
}

/// Threshold applied at time t under the configuration.
inline double threshold_at(const TestConfig& cfg, int n, int T, int t, int grid_size, double sparsity_value) {
  const bool known = std::holds_alternative<grid::KnownTau>(cfg.grid);
  if (cfg.threshold == ThresholdKind::practical) {
    return known ? threshold_practical_known_tau(cfg.alpha, n, T, t, sparsity_value)
                 : threshold_practical_grid(cfg.alpha, n, T, t, grid_size, sparsity_value);
  }
  if (known) return threshold_theoretical(cfg.alpha, n, sparsity_value, KnownLocation{});
  if (std::holds_alternative<grid::Full>(cfg.grid)) {
    // Union bound over all T-1 locations.
    return bernstein_constant * std::sqrt(sparsity_value * std::log(n * static_cast<double>(T - 1) / cfg.alpha));
  }
  return threshold_theoretical(cfg.alpha, n, sparsity_value, GridOverTime{T});
}

/// Builds the verdict from precomputed statistics: rejects iff some norm
/// exceeds its threshold; argmax_t is the exceeding point with the largest
/// norm (smallest t on ties).
inline TestVerdict make_verdict(std::vector<TestStat> stats, double sparsity_value) {
  TestVerdict v;
  v.stats = std::move(stats);
  v.sparsity_used = sparsity_value;
  double best = -1.0;
  for (const auto& s : v.stats) {
    if (s.norm > s.threshold) {
      v.reject = true;
      if (s.norm > best) {
        best = s.norm;
        v.argmax_t = s.t;
      }
    }
  }
  return v;
}

/// Runs the configured test on an existing CUSUM process, reusing its cached
/// norms. The process's spectral settings take precedence over cfg.spectral.
template <typename Scalar>
TestVerdict run_test(const BasicCusumProcess<Scalar>& proc, const TestConfig& cfg) {
  const auto& net = proc.network();
  detail::require(cfg.alpha > 0.0 && cfg.alpha < 1.0, "run_test: alpha must lie in (0,1)");
  const auto pts = grid_points(cfg.grid, net.T());
  detail::require(!pts.empty(), "run_test: empty grid");
  const double s = resolve_sparsity(cfg.sparsity, net);
  detail::require(s > 0.0, "run_test: sparsity is zero, thresholds are undefined");

  std::vector<TestStat> stats;
  stats.reserve(pts.size());
  const int grid_size = static_cast<int>(pts.size());
  for (int t : pts) {
    stats.push_back({t, proc.norm(t), threshold_at(cfg, net.n(), net.T(), t, grid_size, s)});
  }
  return make_verdict(std::move(stats), s);
}

/// Evaluates ||Z_T(t)|| on the configured grid against the configured
/// threshold.
template <typename Scalar>
TestVerdict run_test(const BasicNetwork<Scalar>& net, const TestConfig& cfg) {
  detail::require(net.T() >= 2, "run_test: T must be >= 2");
  return run_test(BasicCusumProcess<Scalar>(net, cfg.spectral), cfg);
}

}  // namespace netcp
