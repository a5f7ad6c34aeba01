#pragma once

// On-disk formats.
//
// Network directory:
//   manifest.json   {"format": "netcp-edges", "version": 1, "n": <int>, "T": <int>}
//   t<k>.edges      one line "i j" per edge of snapshot k (k = 1..T),
//                   0-based node indices with i < j, sorted
//
// Sequence CSV (single file):
//   # n=<int> T=<int>
//   t,i,j
//   <t>,<i>,<j>     one row per edge, t 1-based, i < j
//
// Node schedule JSON:
//   {"universe": N, "latent": [eps_0, ...], "presence": [[labels at t=1], ...]}

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netcp/detect.hpp"
#include "netcp/errors.hpp"
#include "netcp/graph_core.hpp"
#include "netcp/graphon.hpp"

namespace netcp::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  detail::require(static_cast<bool>(out), "cannot write " + path.string());
  out << text;
}

inline std::string snapshot_edges_text(const DynamicNetwork& net, int t) {
  std::string s;
  const auto& a = net.snapshot(t);
  for (int i = 0; i < net.n(); ++i)
    for (int j = i + 1; j < net.n(); ++j)
      if (a(i, j)) s += std::to_string(i) + ' ' + std::to_string(j) + '\n';
  return s;
}

inline void write_network_dir(const DynamicNetwork& net, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest = {{"format", "netcp-edges"}, {"version", 1}, {"n", net.n()}, {"T", net.T()}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  for (int t = 1; t <= net.T(); ++t) write_text(dir / ("t" + std::to_string(t) + ".edges"), snapshot_edges_text(net, t));
}

namespace detail_io {

inline std::pair<int, int> parse_edge(const std::string& line, int n, const std::string& where) {
  std::istringstream ls(line);
  long long i = -1, j = -1;
  std::string rest;
  detail::require(static_cast<bool>(ls >> i >> j) && !(ls >> rest), where + ": expected 'i j', got '" + line + "'");
  detail::require(i >= 0 && j >= 0 && i < n && j < n, where + ": node index out of range");
  detail::require(i != j, where + ": self-loop");
  return {static_cast<int>(i), static_cast<int>(j)};
}

inline bool blank_or_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace detail_io

inline DynamicNetwork read_network_dir(const fs::path& dir) {
  const json manifest = json::parse(read_text(dir / "manifest.json"));
  detail::require(manifest.value("format", "") == "netcp-edges", "unknown manifest format");
  const int n = manifest.at("n").get<int>();
  const int T = manifest.at("T").get<int>();
  detail::require(n >= 1 && T >= 1, "manifest: n and T must be positive");
  std::vector<BinaryMatrix> snaps;
  for (int t = 1; t <= T; ++t) {
    const auto name = "t" + std::to_string(t) + ".edges";
    std::istringstream in(read_text(dir / name));
    BinaryMatrix m = BinaryMatrix::Zero(n, n);
    std::string line;
    while (std::getline(in, line)) {
      if (detail_io::blank_or_comment(line)) continue;
      auto [i, j] = detail_io::parse_edge(line, n, name);
      m(i, j) = m(j, i) = 1;
    }
    snaps.push_back(std::move(m));
  }
  return DynamicNetwork(std::move(snaps));
}

inline std::string network_csv_text(const DynamicNetwork& net) {
  std::string s = "# n=" + std::to_string(net.n()) + " T=" + std::to_string(net.T()) + "\nt,i,j\n";
  for (int t = 1; t <= net.T(); ++t) {
    const auto& a = net.snapshot(t);
    for (int i = 0; i < net.n(); ++i)
      for (int j = i + 1; j < net.n(); ++j)
        if (a(i, j)) s += std::to_string(t) + ',' + std::to_string(i) + ',' + std::to_string(j) + '\n';
  }
  return s;
}

inline DynamicNetwork parse_network_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1, T = -1;
  detail::require(static_cast<bool>(std::getline(in, line)), "CSV: empty input");
  {
    std::istringstream hs(line);
    std::string hash, ns, ts;
    hs >> hash >> ns >> ts;
    detail::require(hash == "#" && ns.rfind("n=", 0) == 0 && ts.rfind("T=", 0) == 0, "CSV: expected '# n=<n> T=<T>' header");
    n = std::stoi(ns.substr(2));
    T = std::stoi(ts.substr(2));
  }
  detail::require(n >= 1 && T >= 1, "CSV: n and T must be positive");
  std::vector<BinaryMatrix> snaps(static_cast<std::size_t>(T), BinaryMatrix::Zero(n, n));
  while (std::getline(in, line)) {
    if (detail_io::blank_or_comment(line) || line.rfind("t,", 0) == 0) continue;
    for (auto& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    long long t = 0;
    detail::require(static_cast<bool>(ls >> t), "CSV: bad row");
    detail::require(t >= 1 && t <= T, "CSV: time index out of range");
    std::string rest;
    std::getline(ls, rest);
    auto [i, j] = detail_io::parse_edge(rest, n, "CSV");
    snaps[static_cast<std::size_t>(t - 1)](i, j) = snaps[static_cast<std::size_t>(t - 1)](j, i) = 1;
  }
  return DynamicNetwork(std::move(snaps));
}

inline void write_network_csv(const DynamicNetwork& net, const fs::path& path) { write_text(path, network_csv_text(net)); }
inline DynamicNetwork read_network_csv(const fs::path& path) { return parse_network_csv(read_text(path)); }

/// Reads either a network directory or a sequence CSV file.
inline DynamicNetwork read_network(const fs::path& path) {
  return fs::is_directory(path) ? read_network_dir(path) : read_network_csv(path);
}

inline json schedule_to_json(const NodeSchedule& s) {
  return {{"universe", s.universe}, {"latent", s.latent}, {"presence", s.presence}};
}

inline NodeSchedule schedule_from_json(const json& j) {
  NodeSchedule s;
  s.universe = j.at("universe").get<int>();
  s.latent = j.at("latent").get<std::vector<double>>();
  s.presence = j.at("presence").get<std::vector<std::vector<int>>>();
  s.validate();
  return s;
}

inline json verdict_to_json(const TestVerdict& v) {
  json stats = json::array();
  for (const auto& s : v.stats) stats.push_back({{"t", s.t}, {"norm", s.norm}, {"threshold", s.threshold}});
  json out = {{"reject", v.reject}, {"sparsity_used", v.sparsity_used}, {"max_norm", v.max_norm()}, {"stats", stats}};
  out["argmax_t"] = v.argmax_t ? json(*v.argmax_t) : json(nullptr);
  return out;
}

}  // namespace netcp::io
