#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spk/aia/access_plan.hpp"
#include "spk/aia/cache.hpp"
#include "spk/aia/request.hpp"
#include "spk/csr.hpp"
#include "spk/spgemm/grouping.hpp"

namespace spk::aia {

namespace detail {

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

struct ModeMetrics {
  std::int64_t requests = 0;
  std::int64_t index_count = 0;  // sum of n over requests
  std::int64_t round_trips = 0;
  std::int64_t accesses = 0;  // processor-side events replayed through the cache
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  double hit_ratio = 0.0;
  std::int64_t bytes_moved = 0;           // line fills
  std::int64_t internal_index_bytes = 0;  // index reads done next to memory
  std::int64_t data_fetches = 0;
  // Order-independent hash of the data-fetch (array, index) multiset.
  std::uint64_t data_fingerprint = 0;
};

struct PhaseReport {
  Phase phase = Phase::Allocation;
  ModeMetrics baseline;
  ModeMetrics aia;
};

struct ModeReport {
  CacheConfig cache;
  std::vector<PhaseReport> phases;
};

template <class T>
ModeMetrics run_mode(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan, Phase phase,
                     Mode mode, const CacheConfig& cfg) {
  const auto layout = spgemm_layout(a, b);
  const auto resolve = spgemm_resolver(a, b, plan);
  CacheSim sim(cfg);
  StreamCursor cursor;
  ModeMetrics m;
  auto sink = [&](const TraceEvent& e) {
    if (e.kind == FetchKind::Data) {
      ++m.data_fetches;
      m.data_fingerprint +=
          detail::mix64((static_cast<std::uint64_t>(e.array) << 56) ^ static_cast<std::uint64_t>(e.index));
    }
    if (e.internal) {
      m.internal_index_bytes += layout.width(e.array);
    } else {
      sim.access(e.address);
    }
  };
  for_each_spgemm_request(a, b, plan, phase, [&](const AiaRequest& req) {
    ++m.requests;
    m.index_count += req.n;
    m.round_trips += emit_request(req, resolve, mode, layout, cursor, sink);
  });
  const auto& s = sim.stats();
  m.accesses = s.accesses;
  m.hits = s.hits;
  m.misses = s.misses;
  m.hit_ratio = s.hit_ratio();
  m.bytes_moved = s.misses * static_cast<std::int64_t>(cfg.line_bytes);
  return m;
}

template <class T>
ModeReport compare_modes(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan,
                         const CacheConfig& cfg,
                         const std::vector<Phase>& phases = {Phase::Allocation,
                                                             Phase::Accumulation}) {
  cfg.check();
  ModeReport report{cfg, {}};
  for (Phase p : phases) {
    report.phases.push_back({p, run_mode(a, b, plan, p, Mode::Baseline, cfg),
                             run_mode(a, b, plan, p, Mode::Aia, cfg)});
  }
  return report;
}

// The exact invariants every report must satisfy. Returns an empty string
// when they hold, otherwise a description of the first violation.
inline std::string check_round_trip_law(const PhaseReport& r) {
  if (r.baseline.requests != r.aia.requests) return "request counts differ between modes";
  if (r.baseline.round_trips != 2 * r.baseline.index_count) {
    return "baseline round trips " + std::to_string(r.baseline.round_trips) + " != 2 * " +
           std::to_string(r.baseline.index_count);
  }
  // Requests with n = 0 cost nothing; the plan never emits them.
  if (r.aia.round_trips != r.aia.requests) {
    return "aia round trips " + std::to_string(r.aia.round_trips) + " != request count " +
           std::to_string(r.aia.requests);
  }
  if (r.baseline.data_fetches != r.aia.data_fetches ||
      r.baseline.data_fingerprint != r.aia.data_fingerprint) {
    return "data-fetch multisets differ";
  }
  return {};
}

}  // namespace spk::aia
