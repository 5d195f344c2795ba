#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"
#include "spk/parallel.hpp"
#include "spk/spgemm/bitonic.hpp"
#include "spk/spgemm/config.hpp"
#include "spk/spgemm/grouping.hpp"
#include "spk/spgemm/hash_accumulator.hpp"

namespace spk {

// Three-phase hash SpGEMM (row grouping, allocation, accumulation).
//
// Work assignment mirrors the two GPU strategies on a CPU worker team:
//  * partial-warp-per-row (group 0): four lanes stride over the nonzeros of
//    the A row, each lane walking whole B rows;
//  * team-per-row (groups 1..3): "warps" stride over the A row while lanes
//    inside a warp stride over each B row.
// In the default mode one worker owns a whole row; with shared_table_mode
// every team member works on the same row and the same table concurrently.

inline constexpr std::size_t kBitonicMaxRow = 8192;

namespace detail {

inline std::size_t table_capacity(std::int64_t ip, int group, const SpgemmConfig& config,
                                  index_t n_cols_b) {
  const auto distinct_bound = std::max<std::int64_t>(1, std::min<std::int64_t>(ip, n_cols_b));
  const auto dynamic = std::bit_ceil(static_cast<std::uint64_t>(distinct_bound));
  if (group < 3) {
    const auto fixed = static_cast<std::uint64_t>(config.table_sizes[static_cast<std::size_t>(group)]);
    if (fixed >= dynamic) return static_cast<std::size_t>(fixed);
  }
  // Row does not fit its group's table (or is group 3): per-row table.
  return static_cast<std::size_t>(dynamic);
}

struct Partition {
  unsigned outer_first = 0;  // first A nonzero (relative) handled by this member
  unsigned outer_step = 1;
  unsigned inner_first = 0;  // first B nonzero (relative) inside each B row
  unsigned inner_step = 1;
};

inline constexpr unsigned kPwprLanes = 4;

// Member `m` of a team of `size` workers cooperating on one row.
inline Partition shared_partition(int group, unsigned m, unsigned size) {
  if (group == 0) {
    const unsigned lanes = std::min(kPwprLanes, size);
    return {m, lanes, 0, 1};
  }
  const unsigned lanes = size % 2 == 0 ? 2 : 1;
  const unsigned warps = size / lanes;
  return {m / lanes, warps, m % lanes, lanes};
}

// Calls visit(kb, ka) for every intermediate product of row i that falls in
// partition p (ka indexes A's nonzeros, kb indexes B's).
template <class T, class Visit>
void walk_row(const Csr<T>& a, const Csr<T>& b, index_t i, const Partition& p, Visit&& visit) {
  const auto col_a = a.col_idx();
  const auto rpt_b = b.row_ptr();
  for (offset_t ka = a.row_begin(i) + p.outer_first; ka < a.row_end(i); ka += p.outer_step) {
    const index_t k = col_a[ka];
    for (offset_t kb = rpt_b[k] + p.inner_first; kb < rpt_b[k + 1]; kb += p.inner_step) {
      visit(kb, ka);
    }
  }
}

// Whole row by a single worker, in A-nonzero order then B order. This is
// the same summation order the reference product uses, so owned-mode values
// are reproducible bit for bit.
template <class T, class Visit>
void walk_row_owned(const Csr<T>& a, const Csr<T>& b, index_t i, Visit&& visit) {
  walk_row(a, b, i, Partition{}, visit);
}

template <class T>
void check_plan(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan) {
  if (a.n_cols() != b.n_rows()) {
    raise(ErrorKind::DimensionMismatch,
          "A has " + std::to_string(a.n_cols()) + " columns, B has " +
              std::to_string(b.n_rows()) + " rows");
  }
  if (plan.n_rows() != static_cast<std::size_t>(a.n_rows()) ||
      plan.sorted_ids.size() != plan.n_rows()) {
    raise(ErrorKind::DimensionMismatch, "row group plan does not match A");
  }
}

template <class T>
using TablePool = std::vector<std::unique_ptr<HashAccumulator<T>>>;

template <class T>
TablePool<T> make_tables(unsigned count, bool with_values, std::uint32_t multiplier) {
  TablePool<T> pool;
  for (unsigned m = 0; m < count; ++m) {
    pool.push_back(std::make_unique<HashAccumulator<T>>(1, with_values, multiplier));
  }
  return pool;
}

// Runs row_fn(member, row, group) over all non-empty rows, group by group.
// In shared mode the caller supplies per-row team work instead.
template <class RowFn>
void for_each_row_owned(WorkerTeam& team, const RowGroupPlan& plan, RowFn&& row_fn) {
  for (int g = 0; g < kGroupCount; ++g) {
    const auto rows = plan.group_rows(g);
    parallel_for(team, rows.size(),
                 [&](unsigned member, std::size_t idx) {
                   const index_t i = rows[idx];
                   if (plan.ip_per_row[static_cast<std::size_t>(i)] == 0) return;
                   row_fn(member, i, g);
                 },
                 g == 0 ? 256 : 1);
  }
}

}  // namespace detail

template <class T>
std::vector<offset_t> allocation_phase(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan,
                                       const SpgemmConfig& config, WorkerTeam& team) {
  detail::check_plan(a, b, plan);
  config.check();
  const auto col_b = b.col_idx();
  std::vector<offset_t> row_ptr(static_cast<std::size_t>(a.n_rows()) + 1, 0);

  if (!config.shared_table_mode) {
    auto tables = detail::make_tables<T>(team.size(), false, config.multiplier);
    detail::for_each_row_owned(team, plan, [&](unsigned member, index_t i, int g) {
      auto& table = *tables[member];
      table.reset(detail::table_capacity(plan.ip_per_row[static_cast<std::size_t>(i)], g,
                                         config, b.n_cols()));
      detail::walk_row_owned(a, b, i, [&](offset_t kb, offset_t) { table.insert(col_b[kb]); });
      row_ptr[static_cast<std::size_t>(i) + 1] = table.unique_count();
    });
  } else {
    HashAccumulator<T> table(1, false, config.multiplier);
    for (int g = 0; g < kGroupCount; ++g) {
      for (index_t i : plan.group_rows(g)) {
        const auto ip = plan.ip_per_row[static_cast<std::size_t>(i)];
        if (ip == 0) continue;
        table.reset(detail::table_capacity(ip, g, config, b.n_cols()));
        team.run([&](unsigned member) {
          const auto part = detail::shared_partition(g, member, team.size());
          if (g == 0 && member >= part.outer_step) return;
          detail::walk_row(a, b, i, part, [&](offset_t kb, offset_t) { table.insert(col_b[kb]); });
        });
        row_ptr[static_cast<std::size_t>(i) + 1] = table.unique_count();
      }
    }
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return row_ptr;
}

template <class T>
std::vector<offset_t> allocation_phase(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan,
                                       const SpgemmConfig& config = {}) {
  WorkerTeam team(config.resolved_workers());
  return allocation_phase(a, b, plan, config, team);
}

namespace detail {

// Gather the table into the row's output span, then sort it by column.
template <class T>
void emit_row(const HashAccumulator<T>& table, index_t i, offset_t begin, offset_t end,
              bool bitonic, std::vector<std::pair<index_t, T>>& scratch,
              std::vector<index_t>& col_out, std::vector<T>& val_out) {
  scratch.clear();
  const auto keys = table.keys();
  const auto vals = table.values();
  for (std::size_t s = 0; s < keys.size(); ++s) {
    if (keys[s] != HashAccumulator<T>::kEmpty) scratch.emplace_back(keys[s], vals[s]);
  }
  if (static_cast<offset_t>(scratch.size()) != end - begin) {
    raise(ErrorKind::CapacityMismatch,
          "row " + std::to_string(i) + ": gathered " + std::to_string(scratch.size()) +
              " entries, allocated " + std::to_string(end - begin));
  }
  if (bitonic && scratch.size() <= kBitonicMaxRow) {
    bitonic_sort(scratch);
  } else {
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
  }
  for (std::size_t n = 0; n < scratch.size(); ++n) {
    col_out[static_cast<std::size_t>(begin) + n] = scratch[n].first;
    val_out[static_cast<std::size_t>(begin) + n] = scratch[n].second;
  }
}

}  // namespace detail

template <class T>
Csr<T> accumulation_phase(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan,
                          std::vector<offset_t> row_ptr_c, const SpgemmConfig& config,
                          WorkerTeam& team) {
  detail::check_plan(a, b, plan);
  config.check();
  if (row_ptr_c.size() != static_cast<std::size_t>(a.n_rows()) + 1) {
    raise(ErrorKind::DimensionMismatch, "row_ptr of C has wrong length");
  }
  const auto col_b = b.col_idx();
  const auto val_a = a.values();
  const auto val_b = b.values();
  const auto nnz = static_cast<std::size_t>(row_ptr_c.back());
  std::vector<index_t> col_idx(nnz);
  std::vector<T> values(nnz);

  auto row_span = [&](index_t i) {
    return std::pair{row_ptr_c[static_cast<std::size_t>(i)],
                     row_ptr_c[static_cast<std::size_t>(i) + 1]};
  };
  auto check_empty = [&](index_t i) {
    auto [begin, end] = row_span(i);
    if (begin != end) {
      raise(ErrorKind::CapacityMismatch,
            "row " + std::to_string(i) + " has no products but " +
                std::to_string(end - begin) + " allocated entries");
    }
  };

  if (!config.shared_table_mode) {
    auto tables = detail::make_tables<T>(team.size(), true, config.multiplier);
    std::vector<std::vector<std::pair<index_t, T>>> scratch(team.size());
    for (index_t i : plan.group_rows(0)) {
      if (plan.ip_per_row[static_cast<std::size_t>(i)] == 0) check_empty(i);
    }
    detail::for_each_row_owned(team, plan, [&](unsigned member, index_t i, int g) {
      auto& table = *tables[member];
      table.reset(detail::table_capacity(plan.ip_per_row[static_cast<std::size_t>(i)], g,
                                         config, b.n_cols()));
      detail::walk_row_owned(a, b, i, [&](offset_t kb, offset_t ka) {
        table.insert_accumulate(col_b[kb], val_a[ka], val_b[kb]);
      });
      auto [begin, end] = row_span(i);
      detail::emit_row(table, i, begin, end, config.bitonic_sort, scratch[member], col_idx, values);
    });
  } else {
    HashAccumulator<T> table(1, true, config.multiplier);
    std::vector<std::pair<index_t, T>> scratch;
    for (int g = 0; g < kGroupCount; ++g) {
      for (index_t i : plan.group_rows(g)) {
        const auto ip = plan.ip_per_row[static_cast<std::size_t>(i)];
        if (ip == 0) {
          check_empty(i);
          continue;
        }
        table.reset(detail::table_capacity(ip, g, config, b.n_cols()));
        team.run([&](unsigned member) {
          const auto part = detail::shared_partition(g, member, team.size());
          if (g == 0 && member >= part.outer_step) return;
          detail::walk_row(a, b, i, part, [&](offset_t kb, offset_t ka) {
            table.insert_accumulate(col_b[kb], val_a[ka], val_b[kb]);
          });
        });
        auto [begin, end] = row_span(i);
        detail::emit_row(table, i, begin, end, config.bitonic_sort, scratch, col_idx, values);
      }
    }
  }
  return Csr<T>::unchecked(a.n_rows(), b.n_cols(), std::move(row_ptr_c), std::move(col_idx),
                           std::move(values));
}

template <class T>
Csr<T> accumulation_phase(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan,
                          std::vector<offset_t> row_ptr_c, const SpgemmConfig& config = {}) {
  WorkerTeam team(config.resolved_workers());
  return accumulation_phase(a, b, plan, std::move(row_ptr_c), config, team);
}

template <class T>
struct SpgemmResult {
  Csr<T> matrix;
  SpgemmStats stats;
};

template <class T>
SpgemmResult<T> spgemm(const Csr<T>& a, const Csr<T>& b, const SpgemmConfig& config = {}) {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::time_point from, clock::time_point to) {
    return std::chrono::duration<double>(to - from).count();
  };
  config.check();
  WorkerTeam team(config.resolved_workers());

  SpgemmResult<T> out;
  const auto t0 = clock::now();
  RowGroupPlan plan = group_rows(count_intermediate_products(a, b), config);
  const auto t1 = clock::now();
  auto row_ptr = allocation_phase(a, b, plan, config, team);
  const auto t2 = clock::now();
  out.matrix = accumulation_phase(a, b, plan, std::move(row_ptr), config, team);
  const auto t3 = clock::now();

  out.stats.total_ip = plan.total_ip;
  out.stats.nnz_out = out.matrix.nnz();
  out.stats.grouping_seconds = seconds(t0, t1);
  out.stats.allocation_seconds = seconds(t1, t2);
  out.stats.accumulation_seconds = seconds(t2, t3);
  return out;
}

}  // namespace spk
