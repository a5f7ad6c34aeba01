#pragma once

// Matrix CUSUM process
//
//   Z_T(t) = sqrt(t(T-t)/T) * ( mean_{s<=t} Y^s - mean_{s>t} Y^s ),
//
// evaluated through the cumulative sums as
//
//   Z_T(t) = sqrt(T/(t(T-t))) * ( S(t) - (t/T) S(T) ),
//
// together with its noiseless mean profile and the location weight q.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "netcp/errors.hpp"
#include "netcp/graph_core.hpp"
#include "netcp/spectral.hpp"

namespace netcp {

/// q(x) = sqrt(x(1-x)) on [0,1].
inline double q_weight(double x) {
  detail::require(x >= 0.0 && x <= 1.0, "q_weight: argument must lie in [0,1]");
  return std::sqrt(x * (1.0 - x));
}

/// Z_T(t) for 1 <= t <= T-1.
template <typename Scalar>
Matrix z_matrix(const BasicNetwork<Scalar>& net, int t) {
  const int T = net.T();
  detail::require(t >= 1 && t <= T - 1, "z_matrix: t must lie in {1..T-1}");
  const double td = t, Td = T;
  const double scale = std::sqrt(Td / (td * (Td - td)));
  return scale * (net.prefix(t).template cast<double>() - (td / Td) * net.prefix(T).template cast<double>());
}

/// Noiseless CUSUM profile mu_T^tau(t); maximal (= sqrt(T) q(tau/T)) at t = tau.
inline double mu_profile(int t, int tau, int T) {
  detail::require(T >= 2, "mu_profile: T must be >= 2");
  detail::require(t >= 1 && t <= T - 1, "mu_profile: t must lie in {1..T-1}");
  detail::require(tau >= 1 && tau <= T - 1, "mu_profile: tau must lie in {1..T-1}");
  const double td = t, Td = T, taud = tau;
  const double scale = std::sqrt(td * (Td - td) / Td);
  return t >= tau + 1 ? scale * taud / td : scale * (Td - taud) / (Td - td);
}

/// Lazily evaluated ||Z_T(t)||_{2->2} over time points, cached per
/// (t, spectral seed). Insertion is mutex-guarded so distinct t may be
/// evaluated from several threads.
template <typename Scalar>
class BasicCusumProcess {
 public:
  BasicCusumProcess(std::shared_ptr<const BasicNetwork<Scalar>> net, SpectralConfig cfg)
      : net_(std::move(net)), cfg_(cfg) {
    detail::require(net_ != nullptr, "CusumProcess: null network");
    detail::require(net_->T() >= 2, "CusumProcess: T must be >= 2");
    cfg_.validate();
  }

  /// Non-owning view; the network must outlive the process.
  BasicCusumProcess(const BasicNetwork<Scalar>& net, SpectralConfig cfg)
      : BasicCusumProcess(std::shared_ptr<const BasicNetwork<Scalar>>(&net, [](const auto*) {}), cfg) {}

  const BasicNetwork<Scalar>& network() const noexcept { return *net_; }
  const SpectralConfig& spectral() const noexcept { return cfg_; }

  Matrix matrix(int t) const { return z_matrix(*net_, t); }

  double norm(int t) const {
    const Key key{t, cfg_.seed};
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const double value = op_norm(z_matrix(*net_, t), cfg_);
    std::lock_guard lock(mutex_);
    cache_.emplace(key, value);
    return value;
  }

  std::vector<std::pair<int, double>> norms(const std::vector<int>& grid) const {
    std::vector<std::pair<int, double>> out;
    out.reserve(grid.size());
    for (int t : grid) out.emplace_back(t, norm(t));
    return out;
  }

 private:
  using Key = std::pair<int, std::uint64_t>;
  std::shared_ptr<const BasicNetwork<Scalar>> net_;
  SpectralConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::map<Key, double> cache_;
};

using CusumProcess = BasicCusumProcess<std::uint8_t>;

/// (t, ||Z_T(t)||) for every t in the grid.
template <typename Scalar>
std::vector<std::pair<int, double>> cusum_norms(const BasicNetwork<Scalar>& net, const std::vector<int>& grid,
                                                const SpectralConfig& cfg = {}) {
  detail::require(net.T() >= 2, "cusum_norms: T must be >= 2");
  for (int t : grid) detail::require(t >= 1 && t <= net.T() - 1, "cusum_norms: grid point outside {1..T-1}");
  BasicCusumProcess<Scalar> proc(net, cfg);
  return proc.norms(grid);
}

/// {1, ..., T-1}.
inline std::vector<int> full_grid(int T) {
  detail::require(T >= 2, "full_grid: T must be >= 2");
  std::vector<int> g(static_cast<std::size_t>(T - 1));
  for (int t = 1; t < T; ++t) g[static_cast<std::size_t>(t - 1)] = t;
  return g;
}

}  // namespace netcp
