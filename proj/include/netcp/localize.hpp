#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "netcp/cusum.hpp"
#include "netcp/detect.hpp"
#include "netcp/errors.hpp"

namespace netcp {

struct LocalizationResult {
  int tau_hat;
  double x_hat;
  double norm_at_hat;
};

/// Picks the smallest t attaining the maximum norm. Norms within 1e-12 of
/// the maximum (relative, absolute below 1) count as ties, so rounding noise
/// in real-valued sequences does not decide the location.
inline LocalizationResult argmax_location(const std::vector<std::pair<int, double>>& norms, int T) {
  detail::require(!norms.empty(), "argmax_location: no statistics");
  double top = norms.front().second;
  for (const auto& p : norms) top = std::max(top, p.second);
  const double cutoff = top - 1e-12 * std::max(1.0, top);
  auto best = std::pair<int, double>{std::numeric_limits<int>::max(), 0.0};
  for (const auto& p : norms)
    if (p.second >= cutoff && p.first < best.first) best = p;
  return {best.first, static_cast<double>(best.first) / T, best.second};
}

/// tau_hat = argmax over t in {1..T-1} of ||Z_T(t)||, smallest t on ties.
template <typename Scalar>
LocalizationResult estimate_cp(const BasicNetwork<Scalar>& net, const SpectralConfig& cfg = {}) {
  detail::require(net.T() >= 2, "estimate_cp: T must be >= 2");
  return argmax_location(cusum_norms(net, full_grid(net.T()), cfg), net.T());
}

/// (N T)^{-1} sum_i |tau_hat_i - tau|.
inline double localization_risk(const std::vector<int>& estimates, int tau, int T) {
  detail::require(!estimates.empty(), "localization_risk: empty estimate list");
  detail::require(T >= 1, "localization_risk: T must be >= 1");
  double total = 0.0;
  for (int e : estimates) total += std::abs(e - tau);
  return total / (static_cast<double>(estimates.size()) * T);
}

/// High-probability bound on |x_hat - x*|:
///   3 c* sqrt(omega log(nT/gamma)) / (Delta sqrt(T) q(x*)),
/// with Delta = ||Pi ⊙ dTheta||. Values above 1 carry no information.
inline double localization_bound(double gamma, int n, int T, double omega, double delta_op_norm, double x_star) {
  detail::require(gamma > 0.0 && gamma < 1.0, "localization_bound: gamma must lie in (0,1)");
  detail::require(delta_op_norm > 0.0, "localization_bound: jump norm must be > 0");
  detail::require(x_star > 0.0 && x_star < 1.0, "localization_bound: x* must lie in (0,1)");
  detail::require(omega > 0.0 && n >= 1 && T >= 1, "localization_bound: invalid sizes");
  const double qx = q_weight(x_star);
  detail::require(qx > 0.0, "localization_bound: q(x*) is zero");
  return 3.0 * bernstein_constant * std::sqrt(omega * std::log(static_cast<double>(n) * T / gamma)) /
         (delta_op_norm * std::sqrt(static_cast<double>(T)) * qx);
}

}  // namespace netcp
