#pragma once

// Sparse-graphon dynamic networks with node churn. Every node label of the
// universe gets one latent position drawn once; at time t the nodes present
// connect with probability rho * W^t(eps_i, eps_j), where W^t switches from
// W1 to W2 after tau. Testing restricts all snapshots to the nodes present
// at every time and runs the dyadic-grid test with the observed-degree
// sparsity estimate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netcp/detect.hpp"
#include "netcp/errors.hpp"
#include "netcp/graph_core.hpp"
#include "netcp/rng.hpp"

namespace netcp {

/// W(x, y) = Q(phi(x), phi(y)) with phi mapping [0,1] onto K consecutive
/// intervals of the given lengths.
class StepGraphon {
 public:
  StepGraphon(Matrix q, std::vector<double> lengths) : q_(std::move(q)), lengths_(std::move(lengths)) {
    detail::require(q_.rows() == q_.cols() && q_.rows() >= 1, "StepGraphon: Q must be square and nonempty");
    detail::require(static_cast<Eigen::Index>(lengths_.size()) == q_.rows(), "StepGraphon: one length per block");
    double total = 0.0;
    for (double l : lengths_) {
      detail::require(l > 0.0, "StepGraphon: interval lengths must be positive");
      total += l;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "StepGraphon: interval lengths must sum to 1");
    detail::require((q_ - q_.transpose()).cwiseAbs().maxCoeff() == 0.0, "StepGraphon: Q must be symmetric");
    detail::require(q_.minCoeff() >= 0.0 && q_.maxCoeff() <= 1.0, "StepGraphon: Q entries must lie in [0,1]");
    for (std::size_t k = 0; k + 1 < lengths_.size(); ++k) {
      cuts_.push_back((cuts_.empty() ? 0.0 : cuts_.back()) + lengths_[k]);
    }
  }

  /// Equal-length blocks.
  static StepGraphon balanced(Matrix q) {
    const auto k = static_cast<std::size_t>(q.rows());
    return {std::move(q), std::vector<double>(k, 1.0 / static_cast<double>(k))};
  }

  int K() const noexcept { return static_cast<int>(q_.rows()); }
  const Matrix& Q() const noexcept { return q_; }
  const std::vector<double>& lengths() const noexcept { return lengths_; }

  int block_of(double x) const {
    return static_cast<int>(std::upper_bound(cuts_.begin(), cuts_.end(), x) - cuts_.begin());
  }

  double operator()(double x, double y) const { return q_(block_of(x), block_of(y)); }

  /// Integral of W over [0,1]^2.
  double mean() const {
    double m = 0.0;
    for (int a = 0; a < K(); ++a)
      for (int b = 0; b < K(); ++b) m += lengths_[static_cast<std::size_t>(a)] * lengths_[static_cast<std::size_t>(b)] * q_(a, b);
    return m;
  }

 private:
  Matrix q_;
  std::vector<double> lengths_;
  std::vector<double> cuts_;
};

/// Closed-form smooth graphon with declared Hölder smoothness gamma and
/// constant L (reported, not verified).
struct SmoothGraphon {
  std::function<double(double, double)> eval;
  double gamma = 1.0;
  double L = 1.0;
  std::string name = "custom";

  double operator()(double x, double y) const { return eval(x, y); }

  /// Spot-checks symmetry and range on a (points x points) grid.
  void validate(int points = 33) const {
    detail::require(static_cast<bool>(eval), "SmoothGraphon: empty function");
    for (int a = 0; a < points; ++a) {
      for (int b = 0; b < points; ++b) {
        const double x = a / (points - 1.0), y = b / (points - 1.0);
        const double v = eval(x, y);
        detail::require(v >= 0.0 && v <= 1.0, "SmoothGraphon: values must lie in [0,1]");
        detail::require(std::abs(v - eval(y, x)) <= 1e-12, "SmoothGraphon: not symmetric");
      }
    }
  }

  static SmoothGraphon average() { return {[](double x, double y) { return 0.5 * (x + y); }, 1.0, 0.5, "average"}; }
  static SmoothGraphon exp_distance() {
    return {[](double x, double y) { return std::exp(-std::abs(x - y)); }, 1.0, 1.0, "exp_distance"};
  }
};

/// Type-erased graphon with a known upper bound on its values.
class Graphon {
 public:
  Graphon(const StepGraphon& g) : eval_([g](double x, double y) { return g(x, y); }), sup_(g.Q().maxCoeff()) {}

  Graphon(const SmoothGraphon& g) : eval_(g.eval) {
    g.validate();
    constexpr int points = 101;
    for (int a = 0; a < points; ++a)
      for (int b = 0; b < points; ++b) sup_ = std::max(sup_, g.eval(a / (points - 1.0), b / (points - 1.0)));
  }

  static Graphon constant(double c) {
    detail::require(c >= 0.0 && c <= 1.0, "constant graphon must lie in [0,1]");
    return StepGraphon(Matrix::Constant(1, 1, c), {1.0});
  }

  double operator()(double x, double y) const { return eval_(x, y); }
  double sup() const noexcept { return sup_; }

 private:
  std::function<double(double, double)> eval_;
  double sup_ = 0.0;
};

/// Node universe with fixed latent positions and per-time presence sets.
struct NodeSchedule {
  int universe = 0;
  std::vector<double> latent;               // one position per label
  std::vector<std::vector<int>> presence;   // sorted labels per t

  int T() const noexcept { return static_cast<int>(presence.size()); }

  void validate() const {
    detail::require(universe >= 1, "NodeSchedule: empty universe");
    detail::require(static_cast<int>(latent.size()) == universe, "NodeSchedule: one latent value per label");
    for (double e : latent) detail::require(e >= 0.0 && e <= 1.0, "NodeSchedule: latent values must lie in [0,1]");
    detail::require(!presence.empty(), "NodeSchedule: no time points");
    for (const auto& p : presence) {
      detail::require(std::is_sorted(p.begin(), p.end()) && std::adjacent_find(p.begin(), p.end()) == p.end(),
                      "NodeSchedule: presence lists must be sorted and unique");
      for (int v : p) detail::require(v >= 0 && v < universe, "NodeSchedule: label outside the universe");
    }
  }

  /// Labels present at every time, sorted.
  std::vector<int> common_nodes() const {
    validate();
    std::vector<int> common = presence.front();
    for (std::size_t t = 1; t < presence.size(); ++t) {
      std::vector<int> next;
      std::set_intersection(common.begin(), common.end(), presence[t].begin(), presence[t].end(),
                            std::back_inserter(next));
      common.swap(next);
    }
    return common;
  }

  static std::vector<double> draw_latent(int universe, std::uint64_t seed) {
    Rng rng(stream_seed(seed, 0));
    std::vector<double> eps(static_cast<std::size_t>(universe));
    for (auto& e : eps) e = rng.uniform();
    return eps;
  }

  /// Every label present at every time.
  static NodeSchedule full(int universe, int T, std::uint64_t seed) {
    detail::require(universe >= 1 && T >= 1, "NodeSchedule::full: invalid sizes");
    std::vector<int> all(static_cast<std::size_t>(universe));
    std::iota(all.begin(), all.end(), 0);
    return {universe, draw_latent(universe, seed), std::vector<std::vector<int>>(static_cast<std::size_t>(T), all)};
  }

  /// Each (label, t) present independently with probability keep.
  static NodeSchedule iid(int universe, int T, double keep, std::uint64_t seed) {
    detail::require(universe >= 1 && T >= 1, "NodeSchedule::iid: invalid sizes");
    detail::require(keep > 0.0 && keep <= 1.0, "NodeSchedule::iid: presence probability must lie in (0,1]");
    NodeSchedule s{universe, draw_latent(universe, seed), {}};
    for (int t = 1; t <= T; ++t) {
      Rng rng(stream_seed(seed ^ 0x70726573ULL, static_cast<std::uint64_t>(t)));
      std::vector<int> p;
      for (int v = 0; v < universe; ++v)
        if (rng.uniform() < keep) p.push_back(v);
      s.presence.push_back(std::move(p));
    }
    return s;
  }
};

/// Snapshot on a subset of labels; row k of the graph is node labels[k].
struct LabeledSnapshot {
  std::vector<int> labels;
  SnapshotGraph graph;
};

/// Draws one snapshot per time point of the schedule. Pairs of present
/// labels connect with probability rho * W^t(eps_a, eps_b), each time from
/// its own stream stream_seed(seed, t).
inline std::vector<LabeledSnapshot> sample_graphon_network(const Graphon& w1, const Graphon& w2, int tau, double rho,
                                                           const NodeSchedule& schedule, std::uint64_t seed) {
  schedule.validate();
  const int T = schedule.T();
  detail::require(tau >= 1 && tau <= T - 1, "sample_graphon_network: tau must lie in {1..T-1}");
  detail::require(rho > 0.0 && rho <= 1.0, "sample_graphon_network: rho must lie in (0,1]");
  detail::require(rho * std::max(w1.sup(), w2.sup()) <= 1.0, "sample_graphon_network: rho * max W exceeds 1");
  std::vector<LabeledSnapshot> out;
  out.reserve(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    const Graphon& w = t <= tau ? w1 : w2;
    const auto& labels = schedule.presence[static_cast<std::size_t>(t - 1)];
    const int m = static_cast<int>(labels.size());
    BinaryMatrix adj = BinaryMatrix::Zero(m, m);
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(t)));
    for (int j = 1; j < m; ++j) {
      const double ej = schedule.latent[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
      for (int i = 0; i < j; ++i) {
        const double ei = schedule.latent[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        if (rng.uniform() < rho * w(ei, ej)) adj(i, j) = adj(j, i) = 1;
      }
    }
    out.push_back({labels, SnapshotGraph(std::move(adj))});
  }
  return out;
}

/// Common-node restriction: a fixed-size network over the labels present in
/// every snapshot, rows ordered by ascending label.
struct RestrictedNetwork {
  DynamicNetwork network;
  std::vector<int> labels;
};

inline RestrictedNetwork restrict_common(const std::vector<LabeledSnapshot>& seq) {
  detail::require(!seq.empty(), "restrict_common: empty sequence");
  std::vector<int> common;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    auto labels = seq[t].labels;
    detail::require(static_cast<int>(labels.size()) == seq[t].graph.n(), "restrict_common: label count mismatch");
    std::sort(labels.begin(), labels.end());
    if (t == 0) {
      common = labels;
    } else {
      std::vector<int> next;
      std::set_intersection(common.begin(), common.end(), labels.begin(), labels.end(), std::back_inserter(next));
      common.swap(next);
    }
  }
  detail::require(!common.empty(), "restrict_common: no node is present at every time");

  const int n = static_cast<int>(common.size());
  std::vector<BinaryMatrix> snaps;
  snaps.reserve(seq.size());
  for (const auto& s : seq) {
    std::map<int, int> row;
    for (std::size_t k = 0; k < s.labels.size(); ++k) row.emplace(s.labels[k], static_cast<int>(k));
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) idx[static_cast<std::size_t>(k)] = row.at(common[static_cast<std::size_t>(k)]);
    BinaryMatrix m(n, n);
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) m(a, b) = s.graph.adjacency()(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    snaps.push_back(std::move(m));
  }
  return {DynamicNetwork(std::move(snaps)), std::move(common)};
}

/// Labels each snapshot of a universe-sized network by the schedule's
/// presence sets (absent nodes are dropped).
inline std::vector<LabeledSnapshot> apply_schedule(const DynamicNetwork& universe_net, const NodeSchedule& schedule) {
  schedule.validate();
  detail::require(universe_net.n() == schedule.universe, "apply_schedule: universe size mismatch");
  detail::require(universe_net.T() == schedule.T(), "apply_schedule: T mismatch");
  std::vector<LabeledSnapshot> out;
  for (int t = 1; t <= universe_net.T(); ++t) {
    const auto& labels = schedule.presence[static_cast<std::size_t>(t - 1)];
    const int m = static_cast<int>(labels.size());
    BinaryMatrix adj(m, m);
    for (int b = 0; b < m; ++b)
      for (int a = 0; a < m; ++a)
        adj(a, b) = universe_net.snapshot(t)(labels[static_cast<std::size_t>(a)], labels[static_cast<std::size_t>(b)]);
    out.push_back({labels, SnapshotGraph(std::move(adj))});
  }
  return out;
}

/// Embeds labeled snapshots into universe-sized graphs (absent nodes isolated).
inline DynamicNetwork embed_in_universe(const std::vector<LabeledSnapshot>& seq, int universe) {
  std::vector<BinaryMatrix> snaps;
  for (const auto& s : seq) {
    BinaryMatrix m = BinaryMatrix::Zero(universe, universe);
    for (auto [i, j] : s.graph.edges()) {
      const int a = s.labels[static_cast<std::size_t>(i)], b = s.labels[static_cast<std::size_t>(j)];
      m(a, b) = m(b, a) = 1;
    }
    snaps.push_back(std::move(m));
  }
  return DynamicNetwork(std::move(snaps));
}

/// Dyadic-grid test on the common-node restriction with omega-hat sparsity.
inline TestVerdict graphon_test(const std::vector<LabeledSnapshot>& seq, double alpha,
                                ThresholdKind threshold = ThresholdKind::practical, const SpectralConfig& spectral = {}) {
  const auto restricted = restrict_common(seq);
  TestConfig cfg;
  cfg.alpha = alpha;
  cfg.grid = grid::Dyadic{};
  cfg.threshold = threshold;
  cfg.sparsity = sparsity::EstimateOmega{};
  cfg.spectral = spectral;
  return run_test(restricted.network, cfg);
}

/// Reported detection boundary on q(tau/T) ||dW|| for K-step graphons:
///   c* ((sqrt(log(2n log2 T/alpha)) + sqrt(log(n/beta))) / (T rho n))^{1/2} + 4 (K log n / n)^{1/4}.
inline double step_graphon_boundary(double alpha, double beta, int n, int T, double rho, int K) {
  detail::require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0, "levels must lie in (0,1)");
  detail::require(n >= 2 && T >= 2 && rho > 0.0 && K >= 1, "invalid boundary arguments");
  const double logs = std::sqrt(std::log(2.0 * n * std::log2(static_cast<double>(T)) / alpha)) + std::sqrt(std::log(n / beta));
  return bernstein_constant * std::sqrt(logs / (T * rho * n)) + 4.0 * std::pow(K * std::log(static_cast<double>(n)) / n, 0.25);
}

/// Same boundary for Hölder graphons with smoothness gamma; the unspecified
/// absolute constant of the approximation term is passed in as c_approx.
/// The approximation term decays as (log n / n)^{min(gamma,1)/2}.
inline double holder_graphon_boundary(double alpha, double beta, int n, int T, double rho, double gamma,
                                      double c_approx) {
  detail::require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0, "levels must lie in (0,1)");
  detail::require(n >= 2 && T >= 2 && rho > 0.0 && gamma > 0.0 && c_approx >= 0.0, "invalid boundary arguments");
  const double logs = std::sqrt(std::log(2.0 * n * std::log2(static_cast<double>(T)) / alpha)) + std::sqrt(std::log(n / beta));
  return bernstein_constant * std::sqrt(logs / (T * rho * n)) +
         c_approx * std::pow(std::log(static_cast<double>(n)) / n, std::min(gamma, 1.0) / 2.0);
}

}  // namespace netcp
