#include <catch_amalgamated.hpp>

#include "netcp/generators.hpp"
#include "netcp/graph_core.hpp"

using namespace netcp;
using Catch::Matchers::WithinAbs;

TEST_CASE("norm_1_inf takes the largest absolute column sum") {
  CHECK(norm_1_inf(Matrix::Ones(3, 3)) == 3.0);
  CHECK(norm_1_inf(Matrix::Identity(6, 6)) == 1.0);
  Matrix m = Matrix::Zero(3, 3);
  m.col(1) << 0.2, 0.5, -0.5;
  CHECK_THAT(norm_1_inf(m), WithinAbs(1.2, 1e-15));
  CHECK_THROWS_AS(norm_1_inf(Matrix(0, 0)), validation_error);
}

TEST_CASE("empirical_quantile uses nearest rank") {
  const std::vector<double> v{3, 1, 2, 4};
  CHECK(empirical_quantile(v, 0.25) == 1);
  CHECK(empirical_quantile(v, 0.26) == 2);
  CHECK(empirical_quantile(v, 0.5) == 2);
  CHECK(empirical_quantile(v, 0.99) == 4);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), validation_error);
}

TEST_CASE("SnapshotGraph enforces symmetry, zero diagonal and binary entries") {
  BinaryMatrix a = BinaryMatrix::Zero(3, 3);
  a(0, 1) = 1;
  CHECK_THROWS_AS(SnapshotGraph(a), validation_error);
  a(1, 0) = 1;
  CHECK_NOTHROW(SnapshotGraph(a));
  a(2, 2) = 1;
  CHECK_THROWS_AS(SnapshotGraph(a), validation_error);
  a(2, 2) = 0;
  a(0, 2) = a(2, 0) = 2;
  CHECK_THROWS_AS(SnapshotGraph(a), validation_error);

  SnapshotGraph g(4);
  g.add_edge(2, 0);
  g.add_edge(1, 3);
  CHECK_THROWS_AS(g.add_edge(1, 1), validation_error);
  CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 2}, {1, 3}});
  CHECK(g == SnapshotGraph::from_edges(4, {{0, 2}, {3, 1}}));
  CHECK(g.degrees() == std::vector<double>{1, 1, 1, 1});
}

TEST_CASE("ProbMatrix modes") {
  CHECK_NOTHROW(ProbMatrix::connection(Matrix::Ones(3, 3) - Matrix::Identity(3, 3)));
  CHECK_THROWS_AS(ProbMatrix::connection(Matrix::Ones(3, 3)), validation_error);
  CHECK_NOTHROW(ProbMatrix::full_sampling(3));
  Matrix p = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(ProbMatrix::sampling(p), validation_error);
  p.setConstant(0.5);
  p.diagonal().setOnes();
  CHECK(ProbMatrix::sampling(p).min_off_diagonal() == 0.5);
  Matrix bad = p;
  bad(0, 1) = 0.4;
  CHECK_THROWS_AS(ProbMatrix::sampling(bad), validation_error);
  bad(0, 1) = 1.5;
  bad(1, 0) = 1.5;
  CHECK_THROWS_AS(ProbMatrix::sampling(bad), validation_error);
}

TEST_CASE("estimate_kappa examples") {
  std::vector<SnapshotGraph> complete;
  for (int t = 0; t < 3; ++t) {
    SnapshotGraph g(5);
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) g.add_edge(i, j);
    complete.push_back(g);
  }
  CHECK(estimate_kappa(DynamicNetwork(complete)) == 4.0);

  std::vector<double> degs{0, 0, 0, 0, 10, 10, 10, 10, 10, 10};
  CHECK(empirical_quantile(degs, 0.9) == 10.0);
  // Same shape on a real graph: four isolated nodes and a K6.
  SnapshotGraph g(10);
  for (int i = 4; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j) g.add_edge(i, j);
  CHECK(estimate_kappa(DynamicNetwork(std::vector<SnapshotGraph>{g}), 0.9) == 5.0);
  CHECK(estimate_kappa(DynamicNetwork(std::vector<SnapshotGraph>{g}), 0.4) == 0.0);
  CHECK_THROWS_AS(estimate_kappa(DynamicNetwork(complete), 1.0), validation_error);
  CHECK_THROWS_AS(estimate_kappa(DynamicNetwork(complete), 0.0), validation_error);
}

TEST_CASE("estimate_omega examples") {
  CHECK(estimate_omega(DynamicNetwork(std::vector<SnapshotGraph>(3, SnapshotGraph(6)))) == 0.0);
  SnapshotGraph star(9);
  for (int j = 1; j <= 7; ++j) star.add_edge(0, j);
  CHECK(estimate_omega(DynamicNetwork(std::vector<SnapshotGraph>{SnapshotGraph(9), star})) == 7.0);
}

TEST_CASE("estimate_omega concentrates near p(n-1) on a sampled complete graph") {
  const int n = 60;
  const double p = 0.4;
  const auto theta = ThetaSequence::constant(ProbMatrix::connection(Matrix::Ones(n, n) - Matrix::Identity(n, n)), 1);
  std::vector<double> draws;
  for (std::uint64_t s = 0; s < 100; ++s)
    draws.push_back(estimate_omega(sample_network(theta, SamplingModel::uniform(p), s)));
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= draws.size();
  // The max over n binomial degrees sits above the mean degree by a few
  // standard deviations.
  const double sd = std::sqrt((n - 1) * p * (1 - p));
  CHECK(mean >= p * (n - 1));
  CHECK(mean <= p * (n - 1) + 4.0 * sd);
}

TEST_CASE("omega-hat dominates kappa-hat") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Scenario sc;
    sc.kind = ScenarioKind::sbm2_between;
    sc.n = 30;
    sc.T = 6;
    sc.tau = 3;
    sc.delta = 0.5;
    const auto net = sample_network(ThetaSequence::from_scenario(sc), SamplingModel::uniform(0.7), s);
    for (double level : {0.1, 0.5, 0.9, 0.999}) CHECK(estimate_omega(net) >= estimate_kappa(net, level));
  }
}

TEST_CASE("prefix sums match sums recomputed from scratch") {
  Scenario sc;
  sc.n = 20;
  sc.T = 15;
  sc.tau = 7;
  sc.delta = 1.5;
  const auto net = sample_network(ThetaSequence::from_scenario(sc), SamplingModel::full(), 7);
  for (int t = 0; t <= net.T(); ++t) {
    Eigen::MatrixXi direct = Eigen::MatrixXi::Zero(net.n(), net.n());
    for (int s = 1; s <= t; ++s) direct += net.snapshot(s).cast<int>();
    CHECK(direct == net.prefix(t));
  }
  CHECK_THROWS_AS(net.snapshot(0), validation_error);
  CHECK_THROWS_AS(net.prefix(net.T() + 1), validation_error);
}

TEST_CASE("network constructors reject invalid snapshots") {
  CHECK_THROWS_AS(DynamicNetwork(std::vector<BinaryMatrix>{}), validation_error);
  CHECK_THROWS_AS(DynamicNetwork(std::vector<BinaryMatrix>{BinaryMatrix::Zero(3, 3), BinaryMatrix::Zero(4, 4)}),
                  validation_error);
  BinaryMatrix a = BinaryMatrix::Zero(3, 3);
  a(0, 1) = 1;
  CHECK_THROWS_AS(DynamicNetwork(std::vector<BinaryMatrix>{a}), validation_error);
  Matrix r = Matrix::Zero(2, 2);
  r(0, 1) = r(1, 0) = 0.3;
  CHECK_NOTHROW(RealNetwork(std::vector<Matrix>{r, r}));
}
