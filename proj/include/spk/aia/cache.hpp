#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "spk/aia/request.hpp"
#include "spk/error.hpp"

namespace spk::aia {

struct CacheConfig {
  std::uint64_t capacity_bytes = 128 * 1024;
  std::uint64_t line_bytes = 64;
  std::uint64_t associativity = 4;

  std::uint64_t sets() const { return capacity_bytes / (line_bytes * associativity); }

  void check() const {
    auto pow2 = [](std::uint64_t x) { return x > 0 && std::has_single_bit(x); };
    if (!pow2(capacity_bytes) || !pow2(line_bytes) || !pow2(associativity)) {
      raise(ErrorKind::BadConfig, "cache geometry must be powers of two");
    }
    if (capacity_bytes % (line_bytes * associativity) != 0 ||
        capacity_bytes < line_bytes * associativity) {
      raise(ErrorKind::BadConfig, "capacity must be a multiple of line * associativity");
    }
  }

  static CacheConfig fully_associative(std::uint64_t capacity, std::uint64_t line = 64) {
    return {capacity, line, capacity / line};
  }
};

struct CacheStats {
  std::int64_t accesses = 0;
  std::int64_t hits = 0;
  std::int64_t misses = 0;

  double hit_ratio() const {
    return accesses == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(accesses);
  }
};

// Single-level set-associative LRU cache. Only tags are tracked.
class CacheSim {
 public:
  explicit CacheSim(const CacheConfig& cfg) : cfg_(cfg) {
    cfg_.check();
    line_shift_ = std::countr_zero(cfg_.line_bytes);
    set_mask_ = cfg_.sets() - 1;
    const auto slots = cfg_.sets() * cfg_.associativity;
    tags_.assign(slots, kInvalid);
    stamps_.assign(slots, 0);
  }

  bool access(std::uint64_t address) {
    const std::uint64_t line = address >> line_shift_;
    const std::uint64_t set = line & set_mask_;
    const std::size_t base = static_cast<std::size_t>(set * cfg_.associativity);
    ++stats_.accesses;
    ++clock_;
    std::size_t victim = base;
    for (std::size_t w = base; w < base + cfg_.associativity; ++w) {
      if (tags_[w] == line) {
        stamps_[w] = clock_;
        ++stats_.hits;
        return true;
      }
      if (stamps_[w] < stamps_[victim]) victim = w;
    }
    tags_[victim] = line;
    stamps_[victim] = clock_;
    ++stats_.misses;
    return false;
  }

  const CacheStats& stats() const { return stats_; }
  const CacheConfig& config() const { return cfg_; }

 private:
  static constexpr std::uint64_t kInvalid = std::numeric_limits<std::uint64_t>::max();

  CacheConfig cfg_;
  int line_shift_ = 6;
  std::uint64_t set_mask_ = 0;
  std::vector<std::uint64_t> tags_;
  std::vector<std::uint64_t> stamps_;  // 0 = never used, so empty ways are evicted first
  std::uint64_t clock_ = 0;
  CacheStats stats_;
};

// Replays a trace in order. Engine-internal fetches never reach the
// processor cache and are skipped.
inline CacheStats simulate_cache(const AccessTrace& trace, const CacheConfig& cfg) {
  CacheSim sim(cfg);
  for (const auto& e : trace.events) {
    if (!e.internal) sim.access(e.address);
  }
  return sim.stats();
}

}  // namespace spk::aia
