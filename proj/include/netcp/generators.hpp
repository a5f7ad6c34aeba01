#pragma once

// Synthetic dynamic networks: the five benchmark scenarios (Erdős–Rényi and
// stochastic block models with one change), Bernoulli adjacency draws and
// missing-link masks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netcp/errors.hpp"
#include "netcp/graph_core.hpp"
#include "netcp/rng.hpp"
#include "netcp/spectral.hpp"

namespace netcp {

enum class ScenarioKind {
  erdos_renyi,        // 1: homogeneous rescaling
  sbm2_between,       // 2: change between two communities
  sbm2_within_one,    // 3: change inside one community
  sbm2_within_two,    // 4: change inside both communities
  sbm3_between,       // 5: three communities
};

inline int scenario_number(ScenarioKind k) { return static_cast<int>(k) + 1; }

inline ScenarioKind scenario_from_number(int k) {
  detail::require(k >= 1 && k <= 5, "scenario number must lie in 1..5");
  return static_cast<ScenarioKind>(k - 1);
}

struct Scenario {
  ScenarioKind kind = ScenarioKind::erdos_renyi;
  int n = 100;
  int T = 50;
  int tau = 25;
  double delta = 1.0;
  std::optional<double> rho;  // defaults to n^{-1/2}

  double sparsity_rho() const { return rho.value_or(1.0 / std::sqrt(static_cast<double>(n))); }

  /// Admissible delta range per scenario.
  std::pair<double, double> delta_range() const {
    switch (kind) {
      case ScenarioKind::erdos_renyi: return {0.0, 2.0};
      case ScenarioKind::sbm3_between: return {0.0, 0.5};
      default: return {0.0, 1.0};
    }
  }

  /// delta for which the pre- and post-change matrices coincide.
  double null_delta() const {
    switch (kind) {
      case ScenarioKind::erdos_renyi:
      case ScenarioKind::sbm2_between:
      case ScenarioKind::sbm2_within_one:
      case ScenarioKind::sbm2_within_two: return 1.0;
      case ScenarioKind::sbm3_between: return 0.0;
    }
    return 1.0;
  }

  void validate() const {
    detail::require(n >= 2, "Scenario: n must be >= 2");
    detail::require(T >= 2, "Scenario: T must be >= 2");
    detail::require(tau >= 1 && tau <= T - 1, "Scenario: tau must lie in {1..T-1}");
    const auto [lo, hi] = delta_range();
    detail::require(delta >= lo && delta <= hi, "Scenario: delta outside the scenario range");
    const double r = sparsity_rho();
    detail::require(r > 0.0 && r <= 1.0, "Scenario: rho must lie in (0,1]");
  }
};

/// Contiguous community labels: block k holds sizes[k] consecutive nodes.
inline std::vector<int> block_labels(const std::vector<int>& sizes) {
  std::vector<int> labels;
  for (std::size_t k = 0; k < sizes.size(); ++k) labels.insert(labels.end(), static_cast<std::size_t>(sizes[k]), static_cast<int>(k));
  return labels;
}

/// Theta_ij = Q(c(i), c(j)) off the diagonal, zero on it.
inline Matrix block_matrix(const Matrix& q, const std::vector<int>& labels, double diagonal = 0.0) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      m(i, j) = i == j ? diagonal : q(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]);
  return m;
}

/// Unscaled community matrices (before, after) and block sizes.
struct CommunityModel {
  Matrix q_before, q_after;
  std::vector<int> sizes;
};

inline CommunityModel community_model(const Scenario& sc) {
  sc.validate();
  const double d = sc.delta;
  const int n = sc.n;
  CommunityModel m;
  switch (sc.kind) {
    case ScenarioKind::erdos_renyi:
      m.q_before = Matrix::Constant(1, 1, 0.5);
      m.q_after = Matrix::Constant(1, 1, 0.5 * d);
      m.sizes = {n};
      break;
    case ScenarioKind::sbm2_between:
      m.q_before = (Matrix(2, 2) << 0.6, 1.0, 1.0, 0.6).finished();
      m.q_after = (Matrix(2, 2) << 0.6, d, d, 0.6).finished();
      m.sizes = {n / 2, n - n / 2};
      break;
    case ScenarioKind::sbm2_within_one:
      m.q_before = (Matrix(2, 2) << 1.0, 0.5, 0.5, 0.6).finished();
      m.q_after = (Matrix(2, 2) << d, 0.5, 0.5, 0.6).finished();
      m.sizes = {n / 2, n - n / 2};
      break;
    case ScenarioKind::sbm2_within_two:
      m.q_before = (Matrix(2, 2) << 1.0, 0.2, 0.2, 1.0).finished();
      m.q_after = (Matrix(2, 2) << d, 0.2, 0.2, d).finished();
      m.sizes = {n / 2, n - n / 2};
      break;
    case ScenarioKind::sbm3_between:
      m.q_before = (Matrix(3, 3) << 0.6, 1.0, 0.6, 1.0, 0.6, 0.5, 0.6, 0.5, 0.6).finished();
      m.q_after = (Matrix(3, 3) << 0.6, 1.0 - d, 0.6, 1.0 - d, 0.6, 0.5 + d, 0.6, 0.5 + d, 0.6).finished();
      m.sizes = {n / 3, n / 3, n - 2 * (n / 3)};
      break;
  }
  return m;
}

/// Connection matrices before and after the change.
inline std::pair<ProbMatrix, ProbMatrix> scenario_matrices(const Scenario& sc) {
  const auto m = community_model(sc);
  const double rho = sc.sparsity_rho();
  const auto labels = block_labels(m.sizes);
  return {ProbMatrix::connection(rho * block_matrix(m.q_before, labels)),
          ProbMatrix::connection(rho * block_matrix(m.q_after, labels))};
}

/// Sparsity level used by the benchmark thresholds: n rho for scenario 1,
/// (1/K) n rho max(||Q1||_{1,inf}, ||Q2||_{1,inf}) for K communities.
inline double nominal_kappa(const Scenario& sc) {
  const double rho = sc.sparsity_rho();
  if (sc.kind == ScenarioKind::erdos_renyi) return sc.n * rho;
  const auto m = community_model(sc);
  const double k = static_cast<double>(m.sizes.size());
  return sc.n * rho * std::max(norm_1_inf(m.q_before), norm_1_inf(m.q_after)) / k;
}

/// Per-time connection matrices stored as distinct segments plus an index.
class ThetaSequence {
 public:
  ThetaSequence(std::vector<ProbMatrix> segments, std::vector<int> index)
      : segments_(std::move(segments)), index_(std::move(index)) {
    detail::require(!segments_.empty() && !index_.empty(), "ThetaSequence: empty");
    const int n = segments_.front().n();
    for (const auto& s : segments_) {
      detail::require(s.n() == n, "ThetaSequence: inconsistent dimensions");
      detail::require(s.mode() == ProbMatrix::Mode::connection, "ThetaSequence: needs connection matrices");
    }
    for (int k : index_) detail::require(k >= 0 && k < static_cast<int>(segments_.size()), "ThetaSequence: bad index");
  }

  /// Theta^t = before for t <= tau, after for t > tau.
  static ThetaSequence single_change(ProbMatrix before, ProbMatrix after, int tau, int T) {
    detail::require(tau >= 1 && tau <= T - 1, "single_change: tau must lie in {1..T-1}");
    std::vector<int> idx(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) idx[static_cast<std::size_t>(t - 1)] = t <= tau ? 0 : 1;
    return {{std::move(before), std::move(after)}, std::move(idx)};
  }

  static ThetaSequence constant(ProbMatrix theta, int T) {
    detail::require(T >= 1, "constant: T must be >= 1");
    return {{std::move(theta)}, std::vector<int>(static_cast<std::size_t>(T), 0)};
  }

  static ThetaSequence from_scenario(const Scenario& sc) {
    auto [before, after] = scenario_matrices(sc);
    return single_change(std::move(before), std::move(after), sc.tau, sc.T);
  }

  int T() const noexcept { return static_cast<int>(index_.size()); }
  int n() const noexcept { return segments_.front().n(); }
  const ProbMatrix& at(int t) const {
    detail::require(t >= 1 && t <= T(), "ThetaSequence: t out of range");
    return segments_[static_cast<std::size_t>(index_[static_cast<std::size_t>(t - 1)])];
  }
  const std::vector<ProbMatrix>& segments() const noexcept { return segments_; }

 private:
  std::vector<ProbMatrix> segments_;
  std::vector<int> index_;
};

/// Missing-link model: full observation, uniform rate p, or two-or-more
/// contiguous communities observed fully inside and at rate p across.
struct SamplingModel {
  enum class Kind { full, uniform, block };
  Kind kind = Kind::full;
  double p = 1.0;
  std::vector<int> split_sizes;

  static SamplingModel full() { return {}; }
  static SamplingModel uniform(double p) { return {Kind::uniform, p, {}}; }
  static SamplingModel block(double p, std::vector<int> sizes) { return {Kind::block, p, std::move(sizes)}; }

  void validate(int n) const {
    if (kind == Kind::full) return;
    detail::require(p > 0.0 && p <= 1.0, "SamplingModel: p must lie in (0,1]");
    if (kind == Kind::block) {
      int total = 0;
      for (int s : split_sizes) {
        detail::require(s >= 0, "SamplingModel: negative block size");
        total += s;
      }
      detail::require(total == n, "SamplingModel: block sizes must sum to n");
    }
  }

  /// Pi as a sampling-mode ProbMatrix.
  ProbMatrix pi(int n) const {
    validate(n);
    switch (kind) {
      case Kind::full: return ProbMatrix::full_sampling(n);
      case Kind::uniform: {
        Matrix m = Matrix::Constant(n, n, p);
        m.diagonal().setOnes();
        return ProbMatrix::sampling(std::move(m));
      }
      case Kind::block: {
        const auto labels = block_labels(split_sizes);
        const auto k = static_cast<Eigen::Index>(split_sizes.size());
        Matrix q = Matrix::Constant(k, k, p);
        q.diagonal().setOnes();
        return ProbMatrix::sampling(block_matrix(q, labels, 1.0));
      }
    }
    return ProbMatrix::full_sampling(n);
  }
};

/// Complete network A and observed network Y = Ω ⊙ A from one draw.
struct SampledNetwork {
  DynamicNetwork observed;
  DynamicNetwork complete;
};

/// Draws A^t_ij ~ Bern(Theta^t_ij) and Ω^t_ij ~ Bern(Pi_ij) for i < j.
///
/// Snapshot t uses its own stream stream_seed(seed, t). Pairs are visited
/// column by column (j ascending, then i < j); each pair consumes one uniform
/// for A and, only when Pi_ij < 1, a second one for Ω. Full sampling and
/// block sampling with p = 1 therefore yield identical networks.
inline SampledNetwork sample_network_pair(const ThetaSequence& theta, const SamplingModel& sampling, std::uint64_t seed) {
  const int n = theta.n();
  const ProbMatrix pi = sampling.pi(n);
  std::vector<BinaryMatrix> obs, full;
  obs.reserve(static_cast<std::size_t>(theta.T()));
  full.reserve(static_cast<std::size_t>(theta.T()));
  for (int t = 1; t <= theta.T(); ++t) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(t)));
    const Matrix& th = theta.at(t).matrix();
    BinaryMatrix a = BinaryMatrix::Zero(n, n);
    BinaryMatrix y = BinaryMatrix::Zero(n, n);
    for (int j = 1; j < n; ++j) {
      for (int i = 0; i < j; ++i) {
        const bool edge = rng.uniform() < th(i, j);
        const double pij = pi(i, j);
        const bool seen = pij >= 1.0 || rng.uniform() < pij;
        if (edge) a(i, j) = a(j, i) = 1;
        if (edge && seen) y(i, j) = y(j, i) = 1;
      }
    }
    full.push_back(std::move(a));
    obs.push_back(std::move(y));
  }
  return {DynamicNetwork(std::move(obs)), DynamicNetwork(std::move(full))};
}

/// Observed network only.
inline DynamicNetwork sample_network(const ThetaSequence& theta, const SamplingModel& sampling, std::uint64_t seed) {
  return sample_network_pair(theta, sampling, seed).observed;
}

/// Real-valued expectation sequence Pi ⊙ Theta^t.
inline RealNetwork expectation_network(const ThetaSequence& theta, const SamplingModel& sampling) {
  const ProbMatrix pi = sampling.pi(theta.n());
  std::vector<Matrix> snaps;
  snaps.reserve(static_cast<std::size_t>(theta.T()));
  for (int t = 1; t <= theta.T(); ++t) snaps.push_back(pi.matrix().cwiseProduct(theta.at(t).matrix()));
  return RealNetwork(std::move(snaps));
}

struct TrueSparsity {
  double kappa;
  double omega;
};

/// kappa = max_t ||Theta^t||_{1,inf}, omega = max_t ||Pi ⊙ Theta^t||_{1,inf}.
inline TrueSparsity true_sparsity(const ThetaSequence& theta, const SamplingModel& sampling) {
  const ProbMatrix pi = sampling.pi(theta.n());
  TrueSparsity out{0.0, 0.0};
  for (const auto& seg : theta.segments()) {
    out.kappa = std::max(out.kappa, seg.norm_1_inf());
    out.omega = std::max(out.omega, norm_1_inf(pi.matrix().cwiseProduct(seg.matrix())));
  }
  return out;
}

/// ||Pi ⊙ (Theta_after - Theta_before)||_{2->2} of a single-change sequence.
inline double jump_norm(const ProbMatrix& before, const ProbMatrix& after, const SamplingModel& sampling,
                        const SpectralConfig& cfg = {}) {
  const ProbMatrix pi = sampling.pi(before.n());
  return op_norm(pi.matrix().cwiseProduct(after.matrix() - before.matrix()), cfg);
}

}  // namespace netcp
