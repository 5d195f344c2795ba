#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "spk/aia/request.hpp"
#include "spk/csr.hpp"
#include "spk/error.hpp"
#include "spk/spgemm/grouping.hpp"

namespace spk::aia {

enum class Phase { Allocation, Accumulation };

constexpr std::string_view to_string(Phase p) {
  return p == Phase::Allocation ? "allocation" : "accumulation";
}

// Array IDs of the SpGEMM operands, in layout order.
namespace arrays {
inline constexpr int kMap = 0;
inline constexpr int kRptA = 1;
inline constexpr int kColA = 2;
inline constexpr int kValA = 3;
inline constexpr int kRptB = 4;
inline constexpr int kColB = 5;
inline constexpr int kValB = 6;
}  // namespace arrays

// Element widths follow a 32-bit index / 64-bit value CSR.
inline constexpr int kIndexWidth = 4;
inline constexpr int kValueWidth = 8;

// Destination tags for the request families.
namespace dst {
inline constexpr int kRowRanges = 1;   // rpt_A pairs via Map
inline constexpr int kBRowRanges = 2;  // rpt_B pairs via col_A
inline constexpr int kColB = 3;
inline constexpr int kValB = 4;
inline constexpr int kValA = 5;
}  // namespace dst

template <class T>
MemoryLayout spgemm_layout(const Csr<T>& a, const Csr<T>& b) {
  MemoryLayout layout;
  layout.add_array("Map", kIndexWidth, a.n_rows());
  layout.add_array("rpt_A", kIndexWidth, a.n_rows() + 1);
  layout.add_array("col_A", kIndexWidth, a.nnz());
  layout.add_array("val_A", kValueWidth, a.nnz());
  layout.add_array("rpt_B", kIndexWidth, b.n_rows() + 1);
  layout.add_array("col_B", kIndexWidth, b.nnz());
  layout.add_array("val_B", kValueWidth, b.nnz());
  return layout;
}

// Reads the integer arrays a request can use as its index array. The
// returned resolver refers to its arguments; keep them alive.
template <class T>
Resolver spgemm_resolver(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan) {
  return [&a, &b, &plan](int array, std::int64_t i) -> std::optional<std::int64_t> {
    auto get = [i](auto span) -> std::optional<std::int64_t> {
      if (i < 0 || static_cast<std::size_t>(i) >= span.size()) return std::nullopt;
      return static_cast<std::int64_t>(span[static_cast<std::size_t>(i)]);
    };
    switch (array) {
      case arrays::kMap: return get(std::span<const index_t>(plan.sorted_ids));
      case arrays::kRptA: return get(a.row_ptr());
      case arrays::kColA: return get(a.col_idx());
      case arrays::kRptB: return get(b.row_ptr());
      default: return std::nullopt;
    }
  };
}

template <class T>
void check_access_plan_inputs(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan) {
  if (a.n_cols() != b.n_rows()) raise(ErrorKind::DimensionMismatch, "A columns != B rows");
  if (plan.n_rows() != static_cast<std::size_t>(a.n_rows()) ||
      plan.sorted_ids.size() != plan.n_rows()) {
    raise(ErrorKind::PlanMismatch, "plan covers " + std::to_string(plan.n_rows()) +
                                       " rows, A has " + std::to_string(a.n_rows()));
  }
  const auto rpt_b = b.row_ptr();
  for (index_t i = 0; i < a.n_rows(); ++i) {
    std::int64_t ip = 0;
    for (index_t k : a.row_cols(i)) ip += rpt_b[k + 1] - rpt_b[k];
    if (ip != plan.ip_per_row[static_cast<std::size_t>(i)]) {
      raise(ErrorKind::PlanMismatch, "row " + std::to_string(i) + " has " + std::to_string(ip) +
                                         " products, plan says " +
                                         std::to_string(plan.ip_per_row[static_cast<std::size_t>(i)]));
    }
  }
}

// Streams the ranged-index requests that replace the kernel's reads:
//  1. one R=2 request over rpt_A indexed by Map (row extents, in group order);
//  2. per row, one R=2 request over rpt_B indexed by the row's col_A span;
//  3. per A nonzero with a non-empty B row, a range request for col_B (and
//     val_B in the accumulation phase) indexed through rpt_B;
//  4. accumulation only: per row, a range request for its val_A span.
// Rows with no intermediate products are skipped, as the engine skips them.
template <class T, class Fn>
void for_each_spgemm_request(const Csr<T>& a, const Csr<T>& b, const RowGroupPlan& plan,
                             Phase phase, Fn&& fn) {
  check_access_plan_inputs(a, b, plan);
  const ArrayRef map{arrays::kMap, kIndexWidth}, rpt_a{arrays::kRptA, kIndexWidth},
      col_a{arrays::kColA, kIndexWidth}, val_a{arrays::kValA, kValueWidth},
      rpt_b{arrays::kRptB, kIndexWidth}, col_b{arrays::kColB, kIndexWidth},
      val_b{arrays::kValB, kValueWidth};
  const bool values = phase == Phase::Accumulation;

  // Level 1 covers the contiguous run of active rows in Map order. Inactive
  // rows sit in group 0; emit one request per maximal active run.
  std::int64_t run_start = -1;
  for (std::size_t p = 0; p <= plan.sorted_ids.size(); ++p) {
    const bool active = p < plan.sorted_ids.size() &&
                        plan.ip_per_row[static_cast<std::size_t>(plan.sorted_ids[p])] > 0;
    if (active && run_start < 0) run_start = static_cast<std::int64_t>(p);
    if (!active && run_start >= 0) {
      fn(AiaRequest{dst::kRowRanges, static_cast<std::int64_t>(p) - run_start, 2, rpt_a, map,
                    run_start});
      run_start = -1;
    }
  }

  const auto rpt_b_span = b.row_ptr();
  for (index_t i : plan.sorted_ids) {
    if (plan.ip_per_row[static_cast<std::size_t>(i)] == 0) continue;
    const auto begin = a.row_begin(i);
    const auto len = a.row_length(i);
    if (values) fn(AiaRequest{dst::kValA, 1, len, val_a, rpt_a, i});
    fn(AiaRequest{dst::kBRowRanges, len, 2, rpt_b, col_a, begin});
    for (index_t k : a.row_cols(i)) {
      const auto b_len = rpt_b_span[k + 1] - rpt_b_span[k];
      if (b_len == 0) continue;
      fn(AiaRequest{dst::kColB, 1, b_len, col_b, rpt_b, k});
      if (values) fn(AiaRequest{dst::kValB, 1, b_len, val_b, rpt_b, k});
    }
  }
}

template <class T>
std::vector<AiaRequest> build_spgemm_access_plan(const Csr<T>& a, const Csr<T>& b,
                                                 const RowGroupPlan& plan, Phase phase) {
  std::vector<AiaRequest> out;
  for_each_spgemm_request(a, b, plan, phase, [&](const AiaRequest& r) { out.push_back(r); });
  return out;
}

}  // namespace spk::aia
