#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spk/aia/compare.hpp"
#include "spk/spgemm/config.hpp"

namespace spk::bench {

using json = nlohmann::ordered_json;

// Rounds to three significant digits.
inline double round3(double x) {
  if (x == 0 || !std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return std::strtod(buf, nullptr);
}

struct InputInfo {
  std::string name;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::int64_t nnz = 0;
};

// One row of results. Engine rows fill the counters and timings; simulator
// rows fill the mode fields.
struct ResultRow {
  std::string engine;  // "hash-engine" or "naive-oracle"; empty for simulator rows
  std::string mode;    // "baseline" or "aia"; empty for engine rows
  std::string phase;
  std::optional<SpgemmStats> stats;
  std::optional<aia::ModeMetrics> sim;
  std::optional<double> seconds;  // oracle rows only have a total time
};

struct BenchReport {
  std::string run_id;
  std::string command;
  InputInfo input;
  std::vector<ResultRow> results;
  std::string verify = "skipped";  // pass, fail or skipped
  unsigned workers = 1;
  std::optional<aia::CacheConfig> cache;
  std::uint64_t seed = 0;
  json extra = json::object();
};

inline json to_json(const SpgemmStats& s) {
  const double gflops = s.flops() / 1e9;
  return {{"total_ip", s.total_ip},
          {"nnz_out", s.nnz_out},
          {"grouping_seconds", s.grouping_seconds},
          {"allocation_seconds", s.allocation_seconds},
          {"accumulation_seconds", s.accumulation_seconds},
          {"total_seconds", s.total_seconds()},
          {"flops", s.flops()},
          {"gflops", round3(gflops)}};
}

inline json to_json(const aia::ModeMetrics& m) {
  return {{"requests", m.requests},       {"round_trips", m.round_trips},
          {"accesses", m.accesses},       {"hits", m.hits},
          {"misses", m.misses},           {"hit_ratio", m.hit_ratio},
          {"bytes_moved", m.bytes_moved}, {"internal_index_bytes", m.internal_index_bytes},
          {"data_fetches", m.data_fetches}};
}

inline json to_json(const aia::CacheConfig& c) {
  return {{"capacity_bytes", c.capacity_bytes},
          {"line_bytes", c.line_bytes},
          {"associativity", c.associativity}};
}

inline json to_json(const BenchReport& r) {
  json results = json::array();
  for (const auto& row : r.results) {
    json j = json::object();
    if (!row.engine.empty()) j["engine"] = row.engine;
    if (!row.mode.empty()) j["mode"] = row.mode;
    if (!row.phase.empty()) j["phase"] = row.phase;
    json metrics = json::object();
    if (row.stats) metrics = to_json(*row.stats);
    if (row.sim) metrics = to_json(*row.sim);
    if (row.seconds) metrics["total_seconds"] = *row.seconds;
    j["metrics"] = std::move(metrics);
    results.push_back(std::move(j));
  }
  json env = {{"workers", r.workers}, {"seed", r.seed}};
  env["cache"] = r.cache ? to_json(*r.cache) : json(nullptr);
  return {{"run_id", r.run_id},
          {"command", r.command},
          {"input",
           {{"name", r.input.name},
            {"rows", r.input.rows},
            {"cols", r.input.cols},
            {"nnz", r.input.nnz}}},
          {"results", std::move(results)},
          {"verify", r.verify},
          {"environment", std::move(env)},
          {"extra", r.extra}};
}

// Deterministic id: same command, input and seed give the same id.
inline std::string make_run_id(const std::string& command, const std::string& input,
                               std::uint64_t seed) {
  return command + ":" + input + ":seed" + std::to_string(seed);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Plot-ready rows. Simulator reports use
// matrix,phase,mode,round_trips,accesses,hit_ratio; engine reports use
// matrix,engine,total_ip,nnz_out,allocation_seconds,accumulation_seconds,gflops.
inline std::string to_csv(const BenchReport& r) {
  std::ostringstream out;
  out.precision(17);
  const bool sim = !r.results.empty() && r.results.front().sim.has_value();
  if (sim) {
    out << "matrix,phase,mode,round_trips,accesses,hit_ratio\n";
    for (const auto& row : r.results) {
      if (!row.sim) continue;
      out << csv_escape(r.input.name) << ',' << row.phase << ',' << row.mode << ','
          << row.sim->round_trips << ',' << row.sim->accesses << ',' << row.sim->hit_ratio << '\n';
    }
    return out.str();
  }
  out << "matrix,engine,total_ip,nnz_out,allocation_seconds,accumulation_seconds,gflops\n";
  for (const auto& row : r.results) {
    if (!row.stats) continue;
    const auto& s = *row.stats;
    out << csv_escape(r.input.name) << ',' << row.engine << ',' << s.total_ip << ',' << s.nnz_out
        << ',' << s.allocation_seconds << ',' << s.accumulation_seconds << ','
        << round3(s.flops() / 1e9) << '\n';
  }
  return out.str();
}

}  // namespace spk::bench
