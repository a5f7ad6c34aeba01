#pragma once

// Experiment orchestration (power sweeps over the change size, localization
// risk heatmaps over sampling rate x change size) and ingestion of trip
// records into daily graphs.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "netcp/cusum.hpp"
#include "netcp/detect.hpp"
#include "netcp/errors.hpp"
#include "netcp/generators.hpp"
#include "netcp/graph_core.hpp"
#include "netcp/localize.hpp"
#include "netcp/rng.hpp"

namespace netcp {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). fn must write only to slot i of its outputs.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Evenly spaced grid lo, lo+step, ..., hi (hi included when it lands on
/// the grid up to rounding).
inline std::vector<double> linear_grid(double lo, double hi, double step) {
  detail::require(step > 0.0 && hi >= lo, "linear_grid: need step > 0 and hi >= lo");
  std::vector<double> g;
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long k = 0; k <= count; ++k) g.push_back(std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12);
  return g;
}

struct ExperimentSpec {
  Scenario scenario;                   // delta is overridden per grid point
  SamplingModel sampling = SamplingModel::full();
  std::vector<double> deltas;          // change-size grid
  std::vector<double> sampling_rates;  // heatmap only: p-grid
  int replicates = 100;
  std::uint64_t master_seed = 1;
  double alpha = 0.05;
  ThresholdKind threshold = ThresholdKind::practical;
  std::optional<SparsityChoice> sparsity;  // empty: known nominal kappa of the scenario
  bool known_tau_test = true;
  bool dyadic_test = true;  // dyadic grid with the midpoint added
  bool full_test = true;
  bool stop_at_power_one = false;  // power sweep: stop once every test reached power 1
  SpectralConfig spectral{};
  unsigned threads = 0;

  void validate() const {
    scenario.validate();
    detail::require(replicates >= 1, "ExperimentSpec: replicates must be >= 1");
    detail::require(!deltas.empty(), "ExperimentSpec: empty delta grid");
    detail::require(alpha > 0.0 && alpha < 1.0, "ExperimentSpec: alpha must lie in (0,1)");
    for (double d : deltas) {
      Scenario s = scenario;
      s.delta = d;
      s.validate();
    }
    for (double p : sampling_rates) detail::require(p > 0.0 && p <= 1.0, "ExperimentSpec: sampling rates must lie in (0,1]");
  }

  Scenario at(double delta) const {
    Scenario s = scenario;
    s.delta = delta;
    return s;
  }

  SparsityChoice sparsity_choice() const { return sparsity.value_or(sparsity::Known{nominal_kappa(scenario)}); }
};

struct PowerRow {
  double delta;
  double jump_norm;  // ||Theta_after - Theta_before||
  double enr;
  std::optional<double> power_known_tau, power_dyadic, power_full;
};

struct PowerSweepResult {
  std::vector<PowerRow> rows;  // ascending ENR (ties by delta)
  // Smallest ENR with empirical power exactly 1; empty reports "NA".
  std::optional<double> min_enr_known_tau, min_enr_dyadic, min_enr_full;
};

namespace detail {

inline std::optional<double> first_power_one(const std::vector<PowerRow>& rows,
                                             std::optional<double> PowerRow::*field) {
  for (const auto& r : rows)
    if ((r.*field).has_value() && *(r.*field) == 1.0 && r.enr > 0.0) return r.enr;
  return std::nullopt;
}

}  // namespace detail

/// Power of the enabled tests at each delta, visited in ascending ENR order.
/// Replicate k at every grid point uses replicate_seed(master_seed, k).
inline PowerSweepResult run_power_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const Scenario& base = spec.scenario;
  const double kappa_enr = nominal_kappa(base);

  struct Point {
    double delta, jump, enr;
  };
  std::vector<Point> points;
  for (double d : spec.deltas) {
    auto [before, after] = scenario_matrices(spec.at(d));
    const double jump = op_norm(after.matrix() - before.matrix(), spec.spectral);
    points.push_back({d, jump, enr(jump, base.tau, base.T, kappa_enr)});
  }
  std::stable_sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return a.enr < b.enr || (a.enr == b.enr && a.delta < b.delta);
  });

  TestConfig cfg;
  cfg.alpha = spec.alpha;
  cfg.threshold = spec.threshold;
  cfg.sparsity = spec.sparsity_choice();
  cfg.spectral = spec.spectral;

  PowerSweepResult result;
  for (const auto& pt : points) {
    const auto theta = ThetaSequence::from_scenario(spec.at(pt.delta));
    const auto n_rep = static_cast<std::size_t>(spec.replicates);
    std::vector<std::array<int, 3>> rejections(n_rep, {0, 0, 0});
    parallel_for(
        n_rep,
        [&](std::size_t k) {
          const auto net = sample_network(theta, spec.sampling, replicate_seed(spec.master_seed, k));
          CusumProcess proc(net, spec.spectral);
          TestConfig c = cfg;
          if (spec.known_tau_test) {
            c.grid = grid::KnownTau{base.tau};
            rejections[k][0] = run_test(proc, c).reject;
          }
          if (spec.dyadic_test) {
            c.grid = grid::DyadicMid{};
            rejections[k][1] = run_test(proc, c).reject;
          }
          if (spec.full_test) {
            c.grid = grid::Full{};
            rejections[k][2] = run_test(proc, c).reject;
          }
        },
        spec.threads);

    std::array<int, 3> total{0, 0, 0};
    for (const auto& r : rejections)
      for (int i = 0; i < 3; ++i) total[static_cast<std::size_t>(i)] += r[static_cast<std::size_t>(i)];
    const double N = spec.replicates;
    PowerRow row{pt.delta, pt.jump, pt.enr, {}, {}, {}};
    if (spec.known_tau_test) row.power_known_tau = total[0] / N;
    if (spec.dyadic_test) row.power_dyadic = total[1] / N;
    if (spec.full_test) row.power_full = total[2] / N;
    result.rows.push_back(row);

    if (spec.stop_at_power_one && pt.enr > 0.0) {
      const bool done = (!spec.known_tau_test || detail::first_power_one(result.rows, &PowerRow::power_known_tau)) &&
                        (!spec.dyadic_test || detail::first_power_one(result.rows, &PowerRow::power_dyadic)) &&
                        (!spec.full_test || detail::first_power_one(result.rows, &PowerRow::power_full));
      if (done) break;
    }
  }
  result.min_enr_known_tau = detail::first_power_one(result.rows, &PowerRow::power_known_tau);
  result.min_enr_dyadic = detail::first_power_one(result.rows, &PowerRow::power_dyadic);
  result.min_enr_full = detail::first_power_one(result.rows, &PowerRow::power_full);
  return result;
}

struct RiskCell {
  double p;
  double delta;
  double observed_jump;  // ||Pi ⊙ dTheta||
  double risk;
};

/// Normalized localization risk R_N over the (p, delta) grid. The sampling
/// model's kind is kept and its rate replaced by each p (uniform by default).
/// Replicate k of every cell uses replicate_seed(master_seed, k).
inline std::vector<RiskCell> run_risk_heatmap(const ExperimentSpec& spec) {
  spec.validate();
  detail::require(!spec.sampling_rates.empty(), "run_risk_heatmap: empty sampling-rate grid");
  std::vector<RiskCell> cells;
  for (double p : spec.sampling_rates) {
    SamplingModel sm = spec.sampling;
    if (sm.kind == SamplingModel::Kind::full) sm.kind = SamplingModel::Kind::uniform;
    sm.p = p;
    for (double d : spec.deltas) {
      const Scenario sc = spec.at(d);
      auto [before, after] = scenario_matrices(sc);
      const double observed_jump = jump_norm(before, after, sm, spec.spectral);
      const auto theta = ThetaSequence::single_change(before, after, sc.tau, sc.T);
      std::vector<int> estimates(static_cast<std::size_t>(spec.replicates));
      parallel_for(
          estimates.size(),
          [&](std::size_t k) {
            const auto net = sample_network(theta, sm, replicate_seed(spec.master_seed, k));
            estimates[k] = estimate_cp(net, spec.spectral).tau_hat;
          },
          spec.threads);
      cells.push_back({p, d, observed_jump, localization_risk(estimates, sc.tau, sc.T)});
    }
  }
  return cells;
}

inline std::string power_table_csv(const PowerSweepResult& r) {
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("NA");
    std::ostringstream s;
    s.precision(10);
    s << *v;
    return s.str();
  };
  std::ostringstream out;
  out.precision(10);
  out << "delta,jump_norm,enr,power_known_tau,power_dyadic,power_full\n";
  for (const auto& row : r.rows)
    out << row.delta << ',' << row.jump_norm << ',' << row.enr << ',' << fmt(row.power_known_tau) << ','
        << fmt(row.power_dyadic) << ',' << fmt(row.power_full) << '\n';
  out << "# min_enr_known_tau=" << fmt(r.min_enr_known_tau) << " min_enr_dyadic=" << fmt(r.min_enr_dyadic)
      << " min_enr_full=" << fmt(r.min_enr_full) << '\n';
  return out.str();
}

inline std::string risk_grid_csv(const std::vector<RiskCell>& cells) {
  std::ostringstream out;
  out.precision(10);
  out << "p,delta,observed_jump,risk\n";
  for (const auto& c : cells) out << c.p << ',' << c.delta << ',' << c.observed_jump << ',' << c.risk << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Trip-record ingestion

struct IngestionSpec {
  std::string input_path;
  double min_duration = 180.0;    // seconds; shorter trips are discarded
  double quantile_level = 0.9975;

  void validate() const {
    detail::require(quantile_level > 0.0 && quantile_level < 1.0, "IngestionSpec: level must lie in (0,1)");
    detail::require(min_duration >= 0.0, "IngestionSpec: min duration must be >= 0");
  }
};

struct IngestResult {
  DynamicNetwork network;
  std::vector<std::string> stations;  // row/column order of the snapshots
  std::vector<std::string> days;      // YYYY-MM-DD, one per snapshot
  std::vector<double> day_thresholds;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

inline bool all_digits(const std::string& s, std::size_t from, std::size_t len) {
  if (s.size() < from + len) return false;
  for (std::size_t i = from; i < from + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

/// Calendar date of a timestamp as YYYY-MM-DD. Accepts "YYYY-MM-DD..." and
/// "DD/MM/YYYY...". The date is taken as written, without timezone handling.
inline std::optional<std::string> calendar_day(const std::string& ts) {
  if (all_digits(ts, 0, 4) && ts.size() >= 10 && ts[4] == '-' && all_digits(ts, 5, 2) && ts[7] == '-' && all_digits(ts, 8, 2))
    return ts.substr(0, 10);
  if (all_digits(ts, 0, 2) && ts.size() >= 10 && ts[2] == '/' && all_digits(ts, 3, 2) && ts[5] == '/' && all_digits(ts, 6, 4))
    return ts.substr(6, 4) + "-" + ts.substr(3, 2) + "-" + ts.substr(0, 2);
  return std::nullopt;
}

inline std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::istringstream in(s);
  double v = 0.0;
  std::string rest;
  if (!(in >> v) || (in >> rest) || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline bool is_integer_label(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace detail

/// Builds one graph per calendar day from trip records
/// (origin id, destination id, start timestamp, duration seconds).
///
/// Trips shorter than min_duration and round trips are discarded. Trips are
/// counted per unordered station pair (both directions summed); a pair is
/// linked on a day iff its count exceeds that day's quantile of counts over
/// the pairs with at least one trip. The node set is the union of all
/// station ids seen in well-formed rows, sorted numerically when every id is
/// an integer and lexicographically otherwise.
inline IngestResult ingest_edge_list_text(const std::string& text, const IngestionSpec& spec) {
  spec.validate();
  IngestResult out;
  std::set<std::string> station_set;
  using Pair = std::pair<std::string, std::string>;
  std::map<std::string, std::map<Pair, int>> counts;  // day -> pair -> trips

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = detail::split_csv_line(line);
    const auto warn = [&](const std::string& why) {
      out.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    if (f.size() < 4) {
      if (line_no != 1) warn("expected 4 columns");
      continue;
    }
    const auto duration = detail::parse_number(f[3]);
    const auto day = detail::calendar_day(f[2]);
    if (!duration || !day) {
      if (line_no != 1) warn(!day ? "unparseable timestamp" : "unparseable duration");
      continue;
    }
    if (f[0].empty() || f[1].empty()) {
      warn("empty station id");
      continue;
    }
    if (*duration < 0.0) {
      warn("negative duration");
      continue;
    }
    station_set.insert(f[0]);
    station_set.insert(f[1]);
    if (*duration < spec.min_duration || f[0] == f[1]) continue;
    Pair key = f[0] < f[1] ? Pair{f[0], f[1]} : Pair{f[1], f[0]};
    ++counts[*day][key];
  }
  detail::require(!counts.empty(), "ingest: no usable day of data");

  out.stations.assign(station_set.begin(), station_set.end());
  if (std::all_of(out.stations.begin(), out.stations.end(), detail::is_integer_label)) {
    std::sort(out.stations.begin(), out.stations.end(), [](const std::string& a, const std::string& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
  }
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < out.stations.size(); ++k) index.emplace(out.stations[k], static_cast<int>(k));

  const int n = static_cast<int>(out.stations.size());
  std::vector<BinaryMatrix> snaps;
  for (const auto& [day, pairs] : counts) {
    std::vector<double> values;
    values.reserve(pairs.size());
    for (const auto& kv : pairs) values.push_back(kv.second);
    const double threshold = empirical_quantile(values, spec.quantile_level);
    BinaryMatrix m = BinaryMatrix::Zero(n, n);
    for (const auto& [pair, c] : pairs) {
      if (c > threshold) {
        const int i = index.at(pair.first), j = index.at(pair.second);
        m(i, j) = m(j, i) = 1;
      }
    }
    out.days.push_back(day);
    out.day_thresholds.push_back(threshold);
    snaps.push_back(std::move(m));
  }
  out.network = DynamicNetwork(std::move(snaps));
  return out;
}

inline IngestResult ingest_edge_list(const IngestionSpec& spec) {
  std::ifstream in(spec.input_path, std::ios::binary);
  detail::require(static_cast<bool>(in), "ingest: cannot open " + spec.input_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ingest_edge_list_text(ss.str(), spec);
}

}  // namespace netcp
