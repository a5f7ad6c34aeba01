#pragma once

// Core graph and matrix types shared by every other module: snapshot
// adjacency matrices, connection/sampling probability matrices, a dynamic
// network with cached cumulative sums, and the degree-based sparsity
// estimators that feed the test thresholds.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "netcp/errors.hpp"

namespace netcp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Column-wise 1,inf-norm: max over columns of the sum of absolute values.
template <typename Derived>
double norm_1_inf(const Eigen::MatrixBase<Derived>& m) {
  detail::require(m.rows() > 0 && m.cols() > 0, "norm_1_inf: empty matrix");
  return m.template cast<double>().cwiseAbs().colwise().sum().maxCoeff();
}

/// Nearest-rank empirical quantile: the smallest order statistic whose
/// cumulative fraction is >= level.
inline double empirical_quantile(std::vector<double> values, double level) {
  detail::require(level > 0.0 && level < 1.0, "quantile level must lie in (0,1)");
  detail::require(!values.empty(), "quantile of an empty sample");
  const auto n = static_cast<double>(values.size());
  // The 1e-12 guard keeps level*n from rounding up past an exact integer.
  auto rank = static_cast<std::size_t>(std::ceil(level * n - 1e-12 * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

/// One undirected simple graph: symmetric 0/1 adjacency with zero diagonal.
class SnapshotGraph {
 public:
  SnapshotGraph() = default;

  explicit SnapshotGraph(int n) : adj_(BinaryMatrix::Zero(n, n)) {
    detail::require(n >= 0, "SnapshotGraph: negative node count");
  }

  /// Validates symmetry, zero diagonal and binary entries.
  explicit SnapshotGraph(BinaryMatrix adj) : adj_(std::move(adj)) {
    detail::require(adj_.rows() == adj_.cols(), "SnapshotGraph: adjacency must be square");
    for (Eigen::Index j = 0; j < adj_.cols(); ++j) {
      detail::require(adj_(j, j) == 0, "SnapshotGraph: nonzero diagonal");
      for (Eigen::Index i = 0; i < j; ++i) {
        detail::require(adj_(i, j) <= 1, "SnapshotGraph: entries must be 0 or 1");
        detail::require(adj_(i, j) == adj_(j, i), "SnapshotGraph: adjacency not symmetric");
      }
    }
  }

  static SnapshotGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    SnapshotGraph g(n);
    for (auto [i, j] : edges) g.add_edge(i, j);
    return g;
  }

  void add_edge(int i, int j) {
    detail::require(i >= 0 && j >= 0 && i < n() && j < n(), "edge endpoint out of range");
    detail::require(i != j, "self-loops are not allowed");
    adj_(i, j) = 1;
    adj_(j, i) = 1;
  }

  int n() const noexcept { return static_cast<int>(adj_.rows()); }
  bool has_edge(int i, int j) const { return adj_(i, j) != 0; }
  const BinaryMatrix& adjacency() const noexcept { return adj_; }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n(); ++i)
      for (int j = i + 1; j < n(); ++j)
        if (adj_(i, j)) out.emplace_back(i, j);
    return out;
  }

  /// Column sums (node degrees).
  std::vector<double> degrees() const {
    std::vector<double> d(static_cast<std::size_t>(n()));
    for (int j = 0; j < n(); ++j) d[static_cast<std::size_t>(j)] = adj_.col(j).cast<double>().sum();
    return d;
  }

  friend bool operator==(const SnapshotGraph& a, const SnapshotGraph& b) {
    return a.adj_.rows() == b.adj_.rows() && a.adj_ == b.adj_;
  }

 private:
  BinaryMatrix adj_;
};

/// Symmetric matrix of probabilities. Theta mode holds connection
/// probabilities (zero diagonal); sampling mode holds observation
/// probabilities Pi (unit diagonal, strictly positive off-diagonal).
class ProbMatrix {
 public:
  enum class Mode { connection, sampling };

  ProbMatrix() = default;

  ProbMatrix(Matrix entries, Mode mode) : p_(std::move(entries)), mode_(mode) {
    detail::require(p_.rows() == p_.cols(), "ProbMatrix: must be square");
    const Eigen::Index n = p_.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double v = p_(i, j);
        detail::require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                        "ProbMatrix: entries must lie in [0,1]");
        detail::require(v == p_(j, i), "ProbMatrix: not symmetric");
      }
      if (mode_ == Mode::connection) {
        detail::require(p_(j, j) == 0.0, "ProbMatrix: connection matrix needs zero diagonal");
      } else {
        detail::require(p_(j, j) == 1.0, "ProbMatrix: sampling matrix needs unit diagonal");
      }
    }
    if (mode_ == Mode::sampling && n > 1) {
      detail::require(min_off_diagonal() > 0.0, "ProbMatrix: sampling probabilities must be > 0");
    }
  }

  static ProbMatrix connection(Matrix m) { return {std::move(m), Mode::connection}; }
  static ProbMatrix sampling(Matrix m) { return {std::move(m), Mode::sampling}; }

  /// Pi with every entry equal to one.
  static ProbMatrix full_sampling(int n) { return sampling(Matrix::Ones(n, n)); }

  int n() const noexcept { return static_cast<int>(p_.rows()); }
  Mode mode() const noexcept { return mode_; }
  const Matrix& matrix() const noexcept { return p_; }
  double operator()(int i, int j) const { return p_(i, j); }

  double min_off_diagonal() const {
    double m = 1.0;
    for (Eigen::Index j = 0; j < p_.cols(); ++j)
      for (Eigen::Index i = 0; i < p_.rows(); ++i)
        if (i != j) m = std::min(m, p_(i, j));
    return m;
  }

  /// Largest entry (rho_n for a connection matrix).
  double max_entry() const { return p_.size() ? p_.maxCoeff() : 0.0; }

  double norm_1_inf() const { return netcp::norm_1_inf(p_); }

 private:
  Matrix p_;
  Mode mode_ = Mode::connection;
};

template <typename Scalar>
struct prefix_type {
  using type = double;
};
template <>
struct prefix_type<std::uint8_t> {
  using type = std::int32_t;
};

/// Ordered sequence of T symmetric zero-diagonal snapshots on a fixed node
/// set, with cumulative sums S(t) = sum_{s<=t} snapshot_s cached for t=0..T.
///
/// Scalar = std::uint8_t is the observed binary network (integer prefix
/// sums); Scalar = double carries real-valued sequences such as expectation
/// sequences Pi ⊙ Theta^t used for noiseless checks.
template <typename Scalar>
class BasicNetwork {
 public:
  using SnapshotMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using PrefixScalar = typename prefix_type<Scalar>::type;
  using PrefixMatrix = Eigen::Matrix<PrefixScalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicNetwork() = default;

  explicit BasicNetwork(std::vector<SnapshotMatrix> snapshots) : snaps_(std::move(snapshots)) {
    detail::require(!snaps_.empty(), "network needs at least one snapshot");
    const auto n = snaps_.front().rows();
    for (const auto& s : snaps_) {
      detail::require(s.rows() == n && s.cols() == n, "all snapshots must share the node count");
      check_snapshot(s);
    }
    build_prefix();
  }

  int n() const noexcept { return snaps_.empty() ? 0 : static_cast<int>(snaps_.front().rows()); }
  int T() const noexcept { return static_cast<int>(snaps_.size()); }

  /// Snapshot at time t, 1-based.
  const SnapshotMatrix& snapshot(int t) const {
    detail::require(t >= 1 && t <= T(), "snapshot index out of range");
    return snaps_[static_cast<std::size_t>(t - 1)];
  }

  /// S(t) for t = 0..T (S(0) = 0).
  const PrefixMatrix& prefix(int t) const {
    detail::require(t >= 0 && t <= T(), "prefix index out of range");
    return prefix_[static_cast<std::size_t>(t)];
  }

  const std::vector<SnapshotMatrix>& snapshots() const noexcept { return snaps_; }

  friend bool operator==(const BasicNetwork& a, const BasicNetwork& b) {
    if (a.T() != b.T() || a.n() != b.n()) return false;
    for (std::size_t k = 0; k < a.snaps_.size(); ++k)
      if (a.snaps_[k] != b.snaps_[k]) return false;
    return true;
  }

 private:
  static void check_snapshot(const SnapshotMatrix& s) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      detail::require(s(j, j) == Scalar{0}, "snapshot diagonal must be zero");
      for (Eigen::Index i = 0; i < j; ++i) {
        detail::require(s(i, j) == s(j, i), "snapshot must be symmetric");
        if constexpr (std::is_integral_v<Scalar>) {
          detail::require(s(i, j) <= 1, "binary snapshot entries must be 0 or 1");
        } else {
          detail::require(std::isfinite(s(i, j)), "snapshot entries must be finite");
        }
      }
    }
  }

  void build_prefix() {
    prefix_.reserve(snaps_.size() + 1);
    prefix_.push_back(PrefixMatrix::Zero(n(), n()));
    for (const auto& s : snaps_) prefix_.push_back(prefix_.back() + s.template cast<PrefixScalar>());
  }

  std::vector<SnapshotMatrix> snaps_;
  std::vector<PrefixMatrix> prefix_;
};

using RealNetwork = BasicNetwork<double>;

/// Observed binary dynamic network Y = {Y^t}.
class DynamicNetwork : public BasicNetwork<std::uint8_t> {
 public:
  DynamicNetwork() = default;

  explicit DynamicNetwork(std::vector<BinaryMatrix> snapshots)
      : BasicNetwork<std::uint8_t>(std::move(snapshots)) {}

  explicit DynamicNetwork(const std::vector<SnapshotGraph>& graphs)
      : BasicNetwork<std::uint8_t>(unwrap(graphs)) {}

  SnapshotGraph graph(int t) const { return SnapshotGraph(snapshot(t)); }

 private:
  static std::vector<BinaryMatrix> unwrap(const std::vector<SnapshotGraph>& graphs) {
    std::vector<BinaryMatrix> out;
    out.reserve(graphs.size());
    for (const auto& g : graphs) out.push_back(g.adjacency());
    return out;
  }
};

/// max_t of the level-quantile of the degree sequence of snapshot t.
/// Pass the observed network (default usage) or the complete one.
template <typename Scalar>
double estimate_kappa(const BasicNetwork<Scalar>& net, double level = 0.9) {
  detail::require(level > 0.0 && level < 1.0, "estimate_kappa: level must lie in (0,1)");
  detail::require(net.T() >= 1, "estimate_kappa: empty network");
  double best = 0.0;
  for (int t = 1; t <= net.T(); ++t) {
    const Eigen::RowVectorXd colsum = net.snapshot(t).template cast<double>().colwise().sum();
    std::vector<double> deg(colsum.data(), colsum.data() + colsum.size());
    best = std::max(best, empirical_quantile(std::move(deg), level));
  }
  return best;
}

/// Maximum observed degree: max_t ||Y^t||_{1,inf}.
template <typename Scalar>
double estimate_omega(const BasicNetwork<Scalar>& net) {
  detail::require(net.T() >= 1 && net.n() >= 1, "estimate_omega: empty network");
  double best = 0.0;
  for (int t = 1; t <= net.T(); ++t) best = std::max(best, norm_1_inf(net.snapshot(t)));
  return best;
}

}  // namespace netcp
