// Simulate a two-community network whose between-community rate drops at
// t = 30, test for a change and locate it.
#include <cstdio>

#include "netcp/netcp.hpp"

int main() {
  netcp::Scenario sc;
  sc.kind = netcp::ScenarioKind::sbm2_between;
  sc.n = 100;
  sc.T = 60;
  sc.tau = 30;
  sc.delta = 0.5;

  const auto theta = netcp::ThetaSequence::from_scenario(sc);
  const auto sampling = netcp::SamplingModel::uniform(0.8);
  const auto net = netcp::sample_network(theta, sampling, 2024);

  netcp::TestConfig cfg;
  cfg.grid = netcp::grid::DyadicMid{};
  cfg.sparsity = netcp::sparsity::EstimateOmega{};
  const auto verdict = netcp::run_test(net, cfg);
  std::printf("reject=%s  max norm=%.3f  omega_hat=%.0f\n", verdict.reject ? "yes" : "no", verdict.max_norm(),
              verdict.sparsity_used);

  const auto loc = netcp::estimate_cp(net);
  std::printf("tau_hat=%d (true %d)  norm=%.3f\n", loc.tau_hat, sc.tau, loc.norm_at_hat);
  return 0;
}
