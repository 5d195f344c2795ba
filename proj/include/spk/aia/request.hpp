#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "spk/error.hpp"

namespace spk::aia {

enum class Mode { Baseline, Aia };
enum class FetchKind { Index, Data };

constexpr std::string_view to_string(Mode m) { return m == Mode::Baseline ? "baseline" : "aia"; }
constexpr std::string_view to_string(FetchKind k) {
  return k == FetchKind::Index ? "index-fetch" : "data-fetch";
}

struct ArrayRef {
  int id = 0;
  int width = 4;  // bytes per element, 4 or 8
};

// Ranged indirect request: for t in [0, n) read b[b_offset + t] and then
// a[b[..]] .. a[b[..] + r - 1]. `dst` tags the destination buffer.
struct AiaRequest {
  int dst = 0;
  std::int64_t n = 0;
  std::int64_t r = 1;
  ArrayRef a;
  ArrayRef b;
  std::int64_t b_offset = 0;
};

inline void check_request(const AiaRequest& req) {
  if (req.n < 0 || req.r < 1) raise(ErrorKind::BadConfig, "request needs n >= 0 and r >= 1");
  for (int w : {req.a.width, req.b.width}) {
    if (w != 4 && w != 8) raise(ErrorKind::BadConfig, "element width must be 4 or 8");
  }
}

// Flat address space: arrays are placed in declaration order, each starting
// on a 64-byte boundary. The response stream used in aia mode sits after the
// last array and grows without bound.
class MemoryLayout {
 public:
  static constexpr std::uint64_t kAlign = 64;

  int add_array(std::string name, int width, std::int64_t length) {
    const int id = static_cast<int>(arrays_.size());
    arrays_.push_back({std::move(name), width, length, next_});
    next_ = align(next_ + static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(length));
    return id;
  }

  std::uint64_t address(int array, std::int64_t index) const {
    const auto& a = arrays_.at(static_cast<std::size_t>(array));
    return a.base + static_cast<std::uint64_t>(index) * static_cast<std::uint64_t>(a.width);
  }

  std::uint64_t stream_base() const { return next_; }
  const std::string& name(int array) const { return arrays_.at(static_cast<std::size_t>(array)).name; }
  int width(int array) const { return arrays_.at(static_cast<std::size_t>(array)).width; }
  std::int64_t length(int array) const { return arrays_.at(static_cast<std::size_t>(array)).length; }
  std::size_t size() const { return arrays_.size(); }

 private:
  struct Entry {
    std::string name;
    int width;
    std::int64_t length;
    std::uint64_t base;
  };
  static std::uint64_t align(std::uint64_t x) { return (x + kAlign - 1) / kAlign * kAlign; }

  std::vector<Entry> arrays_;
  std::uint64_t next_ = 0;
};

// Supplies b[i]; nullopt means the value is unavailable.
using Resolver = std::function<std::optional<std::int64_t>(int array, std::int64_t index)>;

struct TraceEvent {
  int array = 0;
  std::int64_t index = 0;
  std::uint64_t address = 0;
  FetchKind kind = FetchKind::Data;
  bool internal = false;  // performed inside the memory-side engine

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct AccessTrace {
  Mode mode = Mode::Baseline;
  std::vector<TraceEvent> events;
  std::int64_t round_trips = 0;
};

// Running write position in the aia response stream.
struct StreamCursor {
  std::uint64_t offset = 0;
};

// Emits the events of one request, in order, to sink(const TraceEvent&) and
// returns the number of processor/memory round trips.
//
// Baseline: for each t, the processor fetches the index and then the range,
// two round trips per index. Aia: the engine performs every index fetch
// itself (events flagged internal) and returns the union of ranges as one
// response, ordered by ascending source address and laid out contiguously
// in the response stream.
template <class Sink>
std::int64_t emit_request(const AiaRequest& req, const Resolver& resolve, Mode mode,
                          const MemoryLayout& layout, StreamCursor& cursor, Sink&& sink) {
  check_request(req);
  if (req.n == 0) return 0;
  auto lookup = [&](std::int64_t t) {
    const auto idx = req.b_offset + t;
    auto v = resolve(req.b.id, idx);
    if (!v) {
      raise(ErrorKind::ResolverFailure,
            "no value for " + layout.name(req.b.id) + "[" + std::to_string(idx) + "]");
    }
    return *v;
  };

  if (mode == Mode::Baseline) {
    for (std::int64_t t = 0; t < req.n; ++t) {
      const auto idx = req.b_offset + t;
      sink(TraceEvent{req.b.id, idx, layout.address(req.b.id, idx), FetchKind::Index, false});
      const auto start = lookup(t);
      for (std::int64_t q = 0; q < req.r; ++q) {
        sink(TraceEvent{req.a.id, start + q, layout.address(req.a.id, start + q),
                        FetchKind::Data, false});
      }
    }
    return 2 * req.n;
  }

  std::vector<std::int64_t> gathered;
  gathered.reserve(static_cast<std::size_t>(req.n * req.r));
  for (std::int64_t t = 0; t < req.n; ++t) {
    const auto idx = req.b_offset + t;
    sink(TraceEvent{req.b.id, idx, layout.address(req.b.id, idx), FetchKind::Index, true});
    const auto start = lookup(t);
    for (std::int64_t q = 0; q < req.r; ++q) gathered.push_back(start + q);
  }
  std::stable_sort(gathered.begin(), gathered.end());
  const auto width = static_cast<std::uint64_t>(req.a.width);
  for (auto idx : gathered) {
    sink(TraceEvent{req.a.id, idx, layout.stream_base() + cursor.offset, FetchKind::Data, false});
    cursor.offset += width;
  }
  return 1;
}

inline AccessTrace expand_trace(const AiaRequest& req, const Resolver& resolve, Mode mode,
                                const MemoryLayout& layout, StreamCursor& cursor) {
  AccessTrace trace;
  trace.mode = mode;
  trace.round_trips = emit_request(req, resolve, mode, layout, cursor,
                                   [&](const TraceEvent& e) { trace.events.push_back(e); });
  return trace;
}

inline AccessTrace expand_trace(const AiaRequest& req, const Resolver& resolve, Mode mode,
                                const MemoryLayout& layout) {
  StreamCursor cursor;
  return expand_trace(req, resolve, mode, layout, cursor);
}

// Debug dump, one event per line: <mode> <array> <index> <addr-hex> <kind>
inline void write_trace(std::ostream& out, const AccessTrace& trace, const MemoryLayout& layout) {
  char addr[32];
  for (const auto& e : trace.events) {
    std::snprintf(addr, sizeof addr, "%llx", static_cast<unsigned long long>(e.address));
    out << to_string(trace.mode) << ' ' << layout.name(e.array) << ' ' << e.index << ' ' << addr
        << ' ' << to_string(e.kind) << '\n';
  }
}

}  // namespace spk::aia
