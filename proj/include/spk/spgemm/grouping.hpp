#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"
#include "spk/spgemm/config.hpp"

namespace spk {

// Per-row workload analysis. sorted_ids is the Map from group-sorted
// position to original row; group g occupies
// sorted_ids[group_bounds[g], group_bounds[g + 1]).
struct RowGroupPlan {
  std::vector<std::int64_t> ip_per_row;
  std::vector<std::uint8_t> group_of_row;
  std::vector<index_t> sorted_ids;
  std::array<std::int64_t, kGroupCount + 1> group_bounds{};
  std::int64_t total_ip = 0;

  std::size_t n_rows() const { return ip_per_row.size(); }

  std::span<const index_t> group_rows(int g) const {
    return std::span<const index_t>(sorted_ids)
        .subspan(static_cast<std::size_t>(group_bounds[g]),
                 static_cast<std::size_t>(group_bounds[g + 1] - group_bounds[g]));
  }
};

template <class T>
std::vector<std::int64_t> count_intermediate_products(const Csr<T>& a, const Csr<T>& b) {
  if (a.n_cols() != b.n_rows()) {
    raise(ErrorKind::DimensionMismatch,
          "A has " + std::to_string(a.n_cols()) + " columns, B has " +
              std::to_string(b.n_rows()) + " rows");
  }
  std::vector<std::int64_t> ip(static_cast<std::size_t>(a.n_rows()), 0);
  const auto rpt_b = b.row_ptr();
  for (index_t i = 0; i < a.n_rows(); ++i) {
    std::int64_t count = 0;
    for (index_t col : a.row_cols(i)) count += rpt_b[col + 1] - rpt_b[col];
    ip[static_cast<std::size_t>(i)] = count;
  }
  return ip;
}

inline int group_for(std::int64_t ip, const SpgemmConfig& config) {
  int g = 0;
  while (g < 3 && ip >= config.group_thresholds[static_cast<std::size_t>(g)]) ++g;
  return g;
}

// Stable counting sort by group, so rows inside a group keep ascending IDs.
inline RowGroupPlan group_rows(std::vector<std::int64_t> ip, const SpgemmConfig& config = {}) {
  config.check();
  RowGroupPlan plan;
  const std::size_t n = ip.size();
  plan.group_of_row.resize(n);
  std::array<std::int64_t, kGroupCount> counts{};
  for (std::size_t i = 0; i < n; ++i) {
    const int g = group_for(ip[i], config);
    plan.group_of_row[i] = static_cast<std::uint8_t>(g);
    ++counts[static_cast<std::size_t>(g)];
    plan.total_ip += ip[i];
  }
  plan.group_bounds[0] = 0;
  for (int g = 0; g < kGroupCount; ++g) {
    plan.group_bounds[g + 1] = plan.group_bounds[g] + counts[static_cast<std::size_t>(g)];
  }
  std::array<std::int64_t, kGroupCount> cursor{};
  for (int g = 0; g < kGroupCount; ++g) cursor[g] = plan.group_bounds[g];
  plan.sorted_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    plan.sorted_ids[static_cast<std::size_t>(cursor[plan.group_of_row[i]]++)] =
        static_cast<index_t>(i);
  }
  plan.ip_per_row = std::move(ip);
  return plan;
}

}  // namespace spk
