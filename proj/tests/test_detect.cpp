#include <catch_amalgamated.hpp>

#include "netcp/detect.hpp"
#include "netcp/generators.hpp"

using namespace netcp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("dyadic grid") {
  CHECK(dyadic_grid(16) == std::vector<int>{1, 2, 4, 8, 12, 14, 15});
  CHECK(dyadic_grid(2) == std::vector<int>{1});
  CHECK(dyadic_grid(100).size() <= 13);
  for (int T = 2; T <= 300; ++T) {
    const auto g = dyadic_grid(T);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(static_cast<double>(g.size()) <= 2.0 + 2.0 * std::floor(std::log2(T / 2.0)));
    CHECK(g.front() == 1);
    CHECK(g.back() == T - 1);
  }
  CHECK_THROWS_AS(dyadic_grid(1), validation_error);
}

TEST_CASE("dyadic grid with midpoint") {
  CHECK(dyadic_grid_with_midpoint(16) == dyadic_grid(16));
  CHECK(dyadic_grid_with_midpoint(50) == std::vector<int>{1, 2, 4, 8, 16, 25, 34, 42, 46, 48, 49});
  CHECK(grid_points(grid::DyadicMid{}, 50).size() == 11);
}

TEST_CASE("practical known-tau threshold") {
  CHECK_THAT(threshold_practical_known_tau(0.05, 100, 100, 50, 8.0), WithinAbs(11.546, 5e-4));
  for (int T = 10; T < 200; T += 10)
    CHECK(threshold_practical_known_tau(0.05, 100, T + 10, (T + 10) / 2, 8.0) < threshold_practical_known_tau(0.05, 100, T, T / 2, 8.0));
  CHECK(threshold_practical_known_tau(0.05, 100, 100, 50, 9.0) > threshold_practical_known_tau(0.05, 100, 100, 50, 8.0));
  CHECK_THROWS_AS(threshold_practical_known_tau(0.05, 100, 100, 100, 8.0), validation_error);
  CHECK_THROWS_AS(threshold_practical_known_tau(1.5, 100, 100, 50, 8.0), validation_error);
}

TEST_CASE("practical grid threshold") {
  for (int t : {1, 17, 50, 99})
    CHECK_THAT(threshold_practical_grid(0.05, 100, 100, t, 1, 8.0), WithinRel(threshold_practical_known_tau(0.05, 100, 100, t, 8.0), 1e-14));
  CHECK(threshold_practical_grid(0.05, 100, 100, 50, 14, 8.0) > threshold_practical_grid(0.05, 100, 100, 50, 13, 8.0));
  CHECK(threshold_practical_grid(0.05, 100, 100, 50, 13, 8.0) > threshold_practical_known_tau(0.05, 100, 100, 50, 8.0));
  // Only the first two log terms carry the grid size.
  const double L = std::log(100 * 13 / 0.05), l = std::log(100 / 0.05);
  const double lead = L / (3.0 * 10.0 * 0.5);
  CHECK_THAT(threshold_practical_grid(0.05, 100, 100, 50, 13, 8.0), WithinRel(lead + std::sqrt(lead * lead + 16.0 * l), 1e-14));
}

TEST_CASE("theoretical thresholds") {
  CHECK_THAT(bernstein_constant, WithinAbs(2.7321, 1e-4));
  CHECK_THAT(threshold_theoretical(0.05, 100, 10.0, KnownLocation{}), WithinAbs(23.82, 5e-3));
  CHECK_THAT(threshold_theoretical(0.05, 100, 10.0, GridOverTime{2}),
             WithinRel(bernstein_constant * std::sqrt(10.0 * std::log(200 / 0.05)), 1e-14));
}

TEST_CASE("energy-to-noise ratio") {
  CHECK_THAT(enr(2.0, 50, 100, 25.0), WithinAbs(2.0, 1e-14));
  CHECK_THAT(enr(4.0, 50, 100, 25.0), WithinAbs(4.0, 1e-14));
  CHECK_THAT(enr(1.0, 50, 100, 3.0) / enr(1.0, 10, 100, 3.0), WithinRel(5.0 / 3.0, 1e-14));
}

TEST_CASE("lower bound constant") {
  CHECK_THAT(lower_bound_constant(0.05, 0.0), WithinAbs(0.15831, 5e-5));
  CHECK(lower_bound_constant(0.05, 0.95) == 0.0);
  double prev = -1.0;
  for (double beta = 0.9; beta >= 0.0; beta -= 0.1) {
    const double v = lower_bound_constant(0.05, beta);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(lower_bound_constant(0.05, 0.99), validation_error);
}

TEST_CASE("theoretical detection boundaries") {
  const double p1 = theoretical_boundary(0.05, 0.05, 100, 100, 10.0, BoundaryKnownLocation{50, 10.0});
  CHECK_THAT(p1, WithinAbs(bernstein_constant * std::sqrt(0.1) * 2.0 * std::sqrt(std::log(2000.0)), 1e-12));
  CHECK_THAT(p1, WithinAbs(4.764, 5e-4));
  const double g = theoretical_boundary(0.05, 0.05, 100, 100, 10.0, BoundaryGrid{});
  CHECK(g / p1 >= std::sqrt(3.0));
  const double first = theoretical_boundary(0.05, 0.05, 100, 4, 10.0, BoundaryGrid{});
  double prev = 1e300;
  for (int T = 4; T <= 1 << 20; T *= 4) {
    const double v = theoretical_boundary(0.05, 0.05, 100, T, 10.0, BoundaryGrid{});
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < first / 100.0);
}

TEST_CASE("distortion diagnostic") {
  const int n = 12;
  const Matrix theta = 0.3 * (Matrix::Ones(n, n) - Matrix::Identity(n, n));
  Matrix rank_one = Matrix::Constant(n, n, 0.3);
  const auto d1 = distortion(ProbMatrix::full_sampling(n), rank_one);
  CHECK(d1.rank == 1);
  CHECK(d1.delta == 1.0);

  const auto pi = SamplingModel::uniform(0.4).pi(n);
  Matrix low = Matrix::Zero(n, n);
  low.topLeftCorner(3, 3).setConstant(1.0);
  low.bottomRightCorner(4, 4).setConstant(2.0);
  const auto d2 = distortion(pi, low);
  CHECK(d2.rank == 2);
  CHECK_THAT(d2.delta, WithinRel(0.4 / std::sqrt(2.0), 1e-14));

  // A change confined to s nodes has rank at most 2s.
  const auto block_pi = SamplingModel::block(0.3, {6, 6}).pi(n);
  for (int s = 1; s <= 3; ++s) {
    Matrix change = Matrix::Zero(n, n);
    for (int v = 0; v < s; ++v)
      for (int u = 0; u < n; ++u)
        if (u != v) change(u, v) = change(v, u) = 0.1 * (1 + (u + v) % 3);
    const auto d = distortion(block_pi, block_pi.matrix().cwiseProduct(change));
    CHECK(d.rank <= 2 * s);
    CHECK(d.delta >= 0.3 / std::sqrt(2.0 * s) - 1e-15);
  }
  CHECK_THROWS_AS(distortion(ProbMatrix::connection(theta), theta), validation_error);
}

TEST_CASE("Hadamard lower bound on random pairs") {
  Rng rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 3 + static_cast<int>(rng.uniform() * 15);
    Matrix a(n, n), b(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) {
        a(i, j) = a(j, i) = 0.05 + rng.uniform();
        b(i, j) = b(j, i) = i == j ? 0.0 : rng.normal();
      }
    const Matrix ab = a.cwiseProduct(b);
    double min_a = 1e300;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) min_a = std::min(min_a, a(i, j));
    const double lhs = min_a / std::sqrt(static_cast<double>(std::max(numerical_rank(ab), 1))) * op_norm(b);
    CHECK(lhs <= op_norm(ab) * (1 + 1e-10));
  }
}

TEST_CASE("run_test on a constant sequence does not reject") {
  const auto net = DynamicNetwork(std::vector<SnapshotGraph>(10, SnapshotGraph::from_edges(6, {{0, 1}, {2, 3}, {4, 5}})));
  for (GridKind g : {GridKind{grid::KnownTau{5}}, GridKind{grid::Dyadic{}}, GridKind{grid::DyadicMid{}}, GridKind{grid::Full{}}}) {
    TestConfig cfg;
    cfg.grid = g;
    const auto v = run_test(net, cfg);
    CHECK_FALSE(v.reject);
    CHECK_FALSE(v.argmax_t.has_value());
    CHECK(v.max_norm() == 0.0);
  }
}

TEST_CASE("run_test verdicts are consistent with their statistics") {
  Scenario sc;
  sc.n = 40;
  sc.T = 20;
  sc.tau = 10;
  for (double delta : {0.0, 0.5, 1.0, 1.6}) {
    sc.delta = delta;
    const auto net = sample_network(ThetaSequence::from_scenario(sc), SamplingModel::full(), 9);
    for (auto th : {ThresholdKind::practical, ThresholdKind::theoretical}) {
      for (GridKind g : {GridKind{grid::KnownTau{10}}, GridKind{grid::Dyadic{}}, GridKind{grid::Full{}}}) {
        TestConfig cfg;
        cfg.grid = g;
        cfg.threshold = th;
        const auto v = run_test(net, cfg);
        bool any = false;
        for (const auto& s : v.stats) any = any || s.norm > s.threshold;
        CHECK(v.reject == any);
        CHECK(v.argmax_t.has_value() == v.reject);
      }
    }
  }
}

TEST_CASE("full-grid maximum dominates the dyadic maximum") {
  Scenario sc;
  sc.kind = ScenarioKind::sbm2_within_one;
  sc.n = 30;
  sc.T = 24;
  sc.tau = 7;
  sc.delta = 0.4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto net = sample_network(ThetaSequence::from_scenario(sc), SamplingModel::uniform(0.8), seed);
    TestConfig cfg;
    cfg.grid = grid::Full{};
    const double full = run_test(net, cfg).max_norm();
    cfg.grid = grid::Dyadic{};
    CHECK(full >= run_test(net, cfg).max_norm());
  }
}

TEST_CASE("sparsity resolution") {
  SnapshotGraph star(6);
  for (int j = 1; j < 6; ++j) star.add_edge(0, j);
  const DynamicNetwork net(std::vector<SnapshotGraph>{star, SnapshotGraph(6), star});
  CHECK(resolve_sparsity(sparsity::Known{3.5}, net) == 3.5);
  CHECK(resolve_sparsity(sparsity::EstimateOmega{}, net) == 5.0);
  CHECK(resolve_sparsity(sparsity::EstimateKappa{0.9}, net) == 5.0);
  CHECK(resolve_sparsity(sparsity::EstimateKappa{0.5}, net) == 1.0);

  const DynamicNetwork empty(std::vector<SnapshotGraph>(4, SnapshotGraph(3)));
  TestConfig cfg;
  CHECK_THROWS_AS(run_test(empty, cfg), validation_error);
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(run_test(net, cfg), validation_error);
}

TEST_CASE("theoretical full-grid threshold uses the T-1 union bound") {
  TestConfig cfg;
  cfg.threshold = ThresholdKind::theoretical;
  cfg.grid = grid::Full{};
  CHECK_THAT(threshold_at(cfg, 100, 50, 7, 49, 10.0), WithinRel(bernstein_constant * std::sqrt(10.0 * std::log(100 * 49 / 0.05)), 1e-14));
}
