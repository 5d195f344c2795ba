#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>

#include "spk/error.hpp"
#include "spk/parallel.hpp"

namespace spk {

inline constexpr int kGroupCount = 4;

struct SpgemmConfig {
  // Rows with ip < thresholds[0] go to group 0, < thresholds[1] to group 1,
  // < thresholds[2] to group 2, everything else to group 3.
  std::array<std::int64_t, 3> group_thresholds{32, 512, 8192};
  // Fixed table capacity for groups 0..2; group 3 tables are sized per row.
  std::array<std::int64_t, 3> table_sizes{64, 1024, 8192};
  // GPU thread-block sizes per group. Kept for reporting; the CPU scheduler
  // does not use them.
  std::array<int, kGroupCount> block_sizes{512, 256, 1024, 1024};
  unsigned worker_count = 1;  // 0 = hardware concurrency
  bool shared_table_mode = false;
  bool bitonic_sort = false;
  std::uint32_t multiplier = 0x9E3779B1u;

  unsigned resolved_workers() const {
    return worker_count == 0 ? hardware_workers() : worker_count;
  }

  void check() const {
    for (std::size_t g = 0; g < group_thresholds.size(); ++g) {
      if (group_thresholds[g] < 1 || (g > 0 && group_thresholds[g] <= group_thresholds[g - 1])) {
        raise(ErrorKind::BadConfig, "group thresholds must be positive and increasing");
      }
    }
    for (auto size : table_sizes) {
      if (size < 1 || !std::has_single_bit(static_cast<std::uint64_t>(size))) {
        raise(ErrorKind::BadConfig, "table size " + std::to_string(size) +
                                        " is not a power of two");
      }
    }
    if ((multiplier & 1u) == 0) raise(ErrorKind::BadConfig, "hash multiplier must be odd");
  }
};

struct SpgemmStats {
  std::int64_t total_ip = 0;
  std::int64_t nnz_out = 0;
  double grouping_seconds = 0;
  double allocation_seconds = 0;
  double accumulation_seconds = 0;

  double total_seconds() const {
    return grouping_seconds + allocation_seconds + accumulation_seconds;
  }
  // Two flops per intermediate product.
  double flops() const {
    const double t = total_seconds();
    return t > 0 ? 2.0 * static_cast<double>(total_ip) / t : 0.0;
  }
};

}  // namespace spk
