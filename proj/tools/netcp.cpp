#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netcp/io.hpp"
#include "netcp/netcp.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using netcp::detail::require;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), what + ": not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  require(v == static_cast<double>(static_cast<int>(v)), what + ": not an integer: '" + s + "'");
  return static_cast<int>(v);
}

// "a:b:step" (inclusive) or "a,b,c".
std::vector<double> parse_values(const std::string& s, const std::string& what) {
  if (s.find(':') != std::string::npos) {
    const auto p = split(s, ':');
    require(p.size() == 3, what + ": expected lo:hi:step");
    return netcp::linear_grid(to_double(p[0], what), to_double(p[1], what), to_double(p[2], what));
  }
  std::vector<double> v;
  for (const auto& part : split(s, ',')) v.push_back(to_double(part, what));
  require(!v.empty(), what + ": empty list");
  return v;
}

netcp::GridKind parse_grid(const std::string& s) {
  if (s == "dyadic") return netcp::grid::Dyadic{};
  if (s == "dyadic-mid") return netcp::grid::DyadicMid{};
  if (s == "full") return netcp::grid::Full{};
  if (s.rfind("tau:", 0) == 0) return netcp::grid::KnownTau{to_int(s.substr(4), "--grid")};
  throw netcp::validation_error("--grid: expected tau:<k>, dyadic, dyadic-mid or full");
}

netcp::ThresholdKind parse_threshold(const std::string& s) {
  if (s == "practical") return netcp::ThresholdKind::practical;
  if (s == "theoretical") return netcp::ThresholdKind::theoretical;
  throw netcp::validation_error("--threshold: expected practical or theoretical");
}

netcp::SparsityChoice parse_kappa(const std::string& s) {
  if (s == "auto") return netcp::sparsity::EstimateKappa{};
  if (s == "omega") return netcp::sparsity::EstimateOmega{};
  return netcp::sparsity::Known{to_double(s, "--kappa")};
}

// full | uniform:<p> | block:<p>:<size>,<size>,...
netcp::SamplingModel parse_sampling(const std::string& s, int n) {
  const auto p = split(s, ':');
  netcp::SamplingModel m;
  if (p[0] == "full" && p.size() == 1) {
    m = netcp::SamplingModel::full();
  } else if (p[0] == "uniform" && p.size() == 2) {
    m = netcp::SamplingModel::uniform(to_double(p[1], "--sampling"));
  } else if (p[0] == "block" && (p.size() == 2 || p.size() == 3)) {
    std::vector<int> sizes;
    if (p.size() == 3) {
      for (const auto& x : split(p[2], ',')) sizes.push_back(to_int(x, "--sampling"));
    } else {
      sizes = {n / 2, n - n / 2};
    }
    m = netcp::SamplingModel::block(to_double(p[1], "--sampling"), sizes);
  } else {
    throw netcp::validation_error("--sampling: expected full, uniform:<p> or block:<p>[:<sizes>]");
  }
  m.validate(n);
  return m;
}

// const:<c> | step:<q11>,<q12>,...,<qKK> (row-major, balanced) | average | exp-distance
netcp::Graphon parse_graphon(const std::string& s) {
  if (s == "average") return netcp::SmoothGraphon::average();
  if (s == "exp-distance") return netcp::SmoothGraphon::exp_distance();
  if (s.rfind("const:", 0) == 0) return netcp::Graphon::constant(to_double(s.substr(6), "graphon"));
  if (s.rfind("step:", 0) == 0) {
    const auto v = split(s.substr(5), ',');
    const auto k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    require(k >= 1 && static_cast<std::size_t>(k * k) == v.size(), "graphon: step values must form a square matrix");
    netcp::Matrix q(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) q(a, b) = to_double(v[static_cast<std::size_t>(a * k + b)], "graphon");
    return netcp::StepGraphon::balanced(q);
  }
  throw netcp::validation_error("graphon: expected const:<c>, step:<values>, average or exp-distance");
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else netcp::io::write_text(out, text);
}

struct Common {
  std::string out;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int restarts = 3;
  unsigned threads = 0;

  netcp::SpectralConfig spectral() const {
    netcp::SpectralConfig cfg;
    cfg.rel_tol = tol;
    cfg.restarts = restarts;
    cfg.seed = netcp::splitmix64(seed ^ 0x5eedULL);
    cfg.validate();
    return cfg;
  }
};

void add_spectral(CLI::App* cmd, Common& c) {
  cmd->add_option("--tol", c.tol, "Relative tolerance of the spectral-norm solver");
  cmd->add_option("--restarts", c.restarts, "Random restarts of the spectral-norm solver");
}

struct ScenarioArgs {
  int scenario = 1;
  int n = 100;
  int T = 50;
  int tau = 25;
  std::optional<double> delta;
  std::optional<double> rho;
  std::string sampling = "full";

  netcp::Scenario make(double d) const {
    netcp::Scenario sc;
    sc.kind = netcp::scenario_from_number(scenario);
    sc.n = n;
    sc.T = T;
    sc.tau = tau;
    sc.rho = rho;
    sc.delta = d;
    sc.validate();
    return sc;
  }
};

void add_scenario(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_option("--scenario", a.scenario, "Scenario number 1-5");
  cmd->add_option("--n", a.n, "Number of nodes");
  cmd->add_option("--T", a.T, "Number of snapshots");
  cmd->add_option("--tau", a.tau, "Change point");
  cmd->add_option("--rho", a.rho, "Sparsity level (default n^-1/2)");
  cmd->add_option("--sampling", a.sampling, "full | uniform:<p> | block:<p>[:<sizes>]");
}

// Expands "--config file.json" into flags placed right after the
// subcommand name; keys given explicitly on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    const json cfg = json::parse(netcp::io::read_text(args[i + 1]));
    require(cfg.is_object(), "--config: expected a JSON object");
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
    std::vector<std::string> extra;
    for (const auto& [key, value] : cfg.items()) {
      const std::string flag = "--" + key;
      bool given = false;
      for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
      if (given) continue;
      if (value.is_boolean()) {
        if (value.get<bool>()) extra.push_back(flag);
      } else if (value.is_string()) {
        extra.push_back(flag);
        extra.push_back(value.get<std::string>());
      } else if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
        extra.push_back(flag);
        extra.push_back(joined);
      } else {
        extra.push_back(flag);
        extra.push_back(value.dump());
      }
    }
    args.insert(args.begin() + 2, extra.begin(), extra.end());
    break;
  }
  return args;
}

int run(int argc, char** argv) {
  CLI::App app{"Spectral-norm CUSUM change-point detection for dynamic networks with missing links"};
  app.require_subcommand(1);
  app.add_option("--config", "JSON file with option values (keys are flag names without dashes)");
  Common c;
  ScenarioArgs sa;

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a scenario network");
  add_scenario(gen, sa);
  gen->add_option("--delta", sa.delta, "Change size (default: the scenario's null value)");
  gen->add_option("--seed", c.seed, "Random seed");
  gen->add_option("--out", c.out, "Output directory, or a .csv file")->required();

  // gen-graphon
  std::string w1s = "const:0.5", w2s;
  int universe = 100;
  double keep = 1.0, g_rho = 1.0;
  std::string schedule_out;
  auto* gg = app.add_subcommand("gen-graphon", "Sample a graphon network with node churn");
  gg->add_option("--graphon1", w1s, "const:<c> | step:<row-major values> | average | exp-distance");
  gg->add_option("--graphon2", w2s, "Graphon after the change (default: graphon1)");
  gg->add_option("--universe", universe, "Number of node labels");
  gg->add_option("--T", sa.T, "Number of snapshots");
  gg->add_option("--tau", sa.tau, "Change point");
  gg->add_option("--rho", g_rho, "Sparsity level");
  gg->add_option("--presence", keep, "Probability that a node is present at a given time");
  gg->add_option("--seed", c.seed, "Random seed");
  gg->add_option("--out", c.out, "Output directory (absent nodes stored as isolated)")->required();
  gg->add_option("--schedule-out", schedule_out, "Schedule JSON path (default <out>/schedule.json)");

  // test
  std::string input, grid_s = "dyadic", threshold_s = "practical", kappa_s = "auto", schedule_in;
  double alpha = 0.05;
  auto* test = app.add_subcommand("test", "Run a change-point test");
  test->add_option("--input", input, "Network directory or CSV")->required();
  test->add_option("--alpha", alpha, "Significance level");
  test->add_option("--grid", grid_s, "tau:<k> | dyadic | dyadic-mid | full");
  test->add_option("--threshold", threshold_s, "practical | theoretical");
  test->add_option("--kappa", kappa_s, "<value> | auto | omega");
  test->add_option("--schedule", schedule_in, "Node schedule JSON; tests on the common nodes");
  test->add_option("--seed", c.seed, "Seed of the spectral solver");
  test->add_option("--out", c.out, "Output JSON path (default stdout)");
  add_spectral(test, c);

  // localize
  auto* loc = app.add_subcommand("localize", "Estimate the change point");
  loc->add_option("--input", input, "Network directory or CSV")->required();
  loc->add_option("--seed", c.seed, "Seed of the spectral solver");
  loc->add_option("--out", c.out, "Output JSON path (default stdout)");
  add_spectral(loc, c);

  // cusum-trace
  std::string trace_grid = "full";
  auto* trace = app.add_subcommand("cusum-trace", "Emit t,norm of the CUSUM statistic");
  trace->add_option("--input", input, "Network directory or CSV")->required();
  trace->add_option("--grid", trace_grid, "dyadic | dyadic-mid | full");
  trace->add_option("--seed", c.seed, "Seed of the spectral solver");
  trace->add_option("--out", c.out, "Output CSV path (default stdout)");
  add_spectral(trace, c);

  // power-sweep
  std::string deltas_s, tests_s = "tau,dyadic,full", sweep_kappa = "nominal", p_s = "0.2:1.0:0.1";
  int replicates = 100;
  bool stop_early = false;
  auto* sweep = app.add_subcommand("power-sweep", "Power of the tests over a change-size grid");
  add_scenario(sweep, sa);
  sweep->add_option("--deltas", deltas_s, "lo:hi:step or a,b,c (default: scenario range, step 0.01)");
  sweep->add_option("--replicates", replicates, "Replicates per grid point");
  sweep->add_option("--alpha", alpha, "Significance level");
  sweep->add_option("--threshold", threshold_s, "practical | theoretical");
  sweep->add_option("--kappa", sweep_kappa, "nominal | <value> | auto | omega");
  sweep->add_option("--tests", tests_s, "Comma list of tau, dyadic, full");
  sweep->add_flag("--stop-at-power-one", stop_early, "Stop once every test reached power 1");
  sweep->add_option("--seed", c.seed, "Master seed");
  sweep->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  sweep->add_option("--out", c.out, "Output CSV path (default stdout)");
  add_spectral(sweep, c);

  // risk-heatmap
  auto* heat = app.add_subcommand("risk-heatmap", "Localization risk over sampling rate x change size");
  add_scenario(heat, sa);
  heat->add_option("--p", p_s, "Sampling rates, lo:hi:step or a,b,c");
  heat->add_option("--deltas", deltas_s, "lo:hi:step or a,b,c (default: scenario range, step 0.1)");
  heat->add_option("--replicates", replicates, "Replicates per cell");
  heat->add_option("--seed", c.seed, "Master seed");
  heat->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  heat->add_option("--out", c.out, "Output CSV path (default stdout)");
  add_spectral(heat, c);

  // ingest
  netcp::IngestionSpec ing;
  auto* ingest = app.add_subcommand("ingest", "Build daily graphs from trip records");
  ingest->add_option("--input", ing.input_path, "CSV: origin,destination,start,duration")->required();
  ingest->add_option("--min-duration", ing.min_duration, "Minimum trip duration in seconds");
  ingest->add_option("--level", ing.quantile_level, "Quantile level of the daily threshold");
  ingest->add_option("--out", c.out, "Output network directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto default_deltas = [&](const netcp::Scenario& sc, double step) {
    if (!deltas_s.empty()) return parse_values(deltas_s, "--deltas");
    const auto [lo, hi] = sc.delta_range();
    return netcp::linear_grid(lo, hi, step);
  };

  if (*gen) {
    const double null_delta = netcp::Scenario{netcp::scenario_from_number(sa.scenario)}.null_delta();
    const auto sc = sa.make(sa.delta.value_or(null_delta));
    const auto net = netcp::sample_network(netcp::ThetaSequence::from_scenario(sc), parse_sampling(sa.sampling, sc.n), c.seed);
    if (fs::path(c.out).extension() == ".csv") netcp::io::write_network_csv(net, c.out);
    else netcp::io::write_network_dir(net, c.out);
    return 0;
  }

  if (*gg) {
    const auto w1 = parse_graphon(w1s);
    const auto w2 = parse_graphon(w2s.empty() ? w1s : w2s);
    require(sa.T >= 2, "--T must be >= 2");
    const auto schedule = keep >= 1.0 ? netcp::NodeSchedule::full(universe, sa.T, c.seed)
                                      : netcp::NodeSchedule::iid(universe, sa.T, keep, c.seed);
    const auto seq = netcp::sample_graphon_network(w1, w2, sa.tau, g_rho, schedule, c.seed);
    netcp::io::write_network_dir(netcp::embed_in_universe(seq, universe), c.out);
    const fs::path sched_path = schedule_out.empty() ? fs::path(c.out) / "schedule.json" : fs::path(schedule_out);
    netcp::io::write_text(sched_path, netcp::io::schedule_to_json(schedule).dump() + "\n");
    return 0;
  }

  if (*test) {
    netcp::TestConfig cfg;
    cfg.alpha = alpha;
    cfg.grid = parse_grid(grid_s);
    cfg.threshold = parse_threshold(threshold_s);
    cfg.sparsity = parse_kappa(kappa_s);
    cfg.spectral = c.spectral();
    const auto net = netcp::io::read_network(input);
    json out;
    if (!schedule_in.empty()) {
      const auto schedule = netcp::io::schedule_from_json(json::parse(netcp::io::read_text(schedule_in)));
      const auto restricted = netcp::restrict_common(netcp::apply_schedule(net, schedule));
      out = netcp::io::verdict_to_json(netcp::run_test(restricted.network, cfg));
      out["common_nodes"] = restricted.labels;
    } else {
      out = netcp::io::verdict_to_json(netcp::run_test(net, cfg));
    }
    emit(c.out, out.dump(2) + "\n");
    return 0;
  }

  if (*loc) {
    const auto net = netcp::io::read_network(input);
    const auto r = netcp::estimate_cp(net, c.spectral());
    const json out = {{"tau_hat", r.tau_hat}, {"x_hat", r.x_hat}, {"norm", r.norm_at_hat}};
    emit(c.out, out.dump(2) + "\n");
    return 0;
  }

  if (*trace) {
    const auto net = netcp::io::read_network(input);
    require(trace_grid != "" && trace_grid.rfind("tau:", 0) != 0, "--grid: expected dyadic, dyadic-mid or full");
    const auto pts = netcp::grid_points(parse_grid(trace_grid), net.T());
    std::ostringstream s;
    s.precision(17);
    s << "t,norm\n";
    for (const auto& [t, v] : netcp::cusum_norms(net, pts, c.spectral())) s << t << ',' << v << '\n';
    emit(c.out, s.str());
    return 0;
  }

  if (*sweep) {
    const auto probe = netcp::Scenario{netcp::scenario_from_number(sa.scenario)};
    netcp::ExperimentSpec spec;
    spec.scenario = sa.make(probe.null_delta());
    spec.sampling = parse_sampling(sa.sampling, sa.n);
    spec.deltas = default_deltas(spec.scenario, 0.01);
    spec.replicates = replicates;
    spec.master_seed = c.seed;
    spec.alpha = alpha;
    spec.threshold = parse_threshold(threshold_s);
    if (sweep_kappa != "nominal") spec.sparsity = parse_kappa(sweep_kappa);
    spec.known_tau_test = spec.dyadic_test = spec.full_test = false;
    for (const auto& t : split(tests_s, ',')) {
      if (t == "tau") spec.known_tau_test = true;
      else if (t == "dyadic") spec.dyadic_test = true;
      else if (t == "full") spec.full_test = true;
      else throw netcp::validation_error("--tests: unknown test '" + t + "'");
    }
    spec.stop_at_power_one = stop_early;
    spec.spectral = c.spectral();
    spec.threads = c.threads;
    emit(c.out, netcp::power_table_csv(netcp::run_power_sweep(spec)));
    return 0;
  }

  if (*heat) {
    const auto probe = netcp::Scenario{netcp::scenario_from_number(sa.scenario)};
    netcp::ExperimentSpec spec;
    spec.scenario = sa.make(probe.null_delta());
    spec.sampling = parse_sampling(sa.sampling, sa.n);
    spec.deltas = default_deltas(spec.scenario, 0.1);
    spec.sampling_rates = parse_values(p_s, "--p");
    spec.replicates = replicates;
    spec.master_seed = c.seed;
    spec.spectral = c.spectral();
    spec.threads = c.threads;
    emit(c.out, netcp::risk_grid_csv(netcp::run_risk_heatmap(spec)));
    return 0;
  }

  if (*ingest) {
    const auto r = netcp::ingest_edge_list(ing);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    netcp::io::write_network_dir(r.network, c.out);
    std::ostringstream days;
    days.precision(17);
    days << "t,day,threshold\n";
    for (std::size_t k = 0; k < r.days.size(); ++k) days << k + 1 << ',' << r.days[k] << ',' << r.day_thresholds[k] << '\n';
    netcp::io::write_text(fs::path(c.out) / "days.csv", days.str());
    std::string stations = "index,station\n";
    for (std::size_t k = 0; k < r.stations.size(); ++k) stations += std::to_string(k) + ',' + r.stations[k] + '\n';
    netcp::io::write_text(fs::path(c.out) / "stations.csv", stations);
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    auto args = expand_config(std::vector<std::string>(argv, argv + argc));
    std::vector<char*> ptrs;
    for (auto& a : args) ptrs.push_back(a.data());
    return run(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const netcp::convergence_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
