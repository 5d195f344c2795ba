#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spk/error.hpp"

namespace spk {

using index_t = std::int32_t;   // column / row index
using offset_t = std::int64_t;  // position into col_idx / values

template <class T>
struct BasicTriplet {
  index_t row;
  index_t col;
  T value;

  friend bool operator==(const BasicTriplet&, const BasicTriplet&) = default;
};

using Triplet = BasicTriplet<double>;

enum class DupPolicy { Sum, Error };

// Compressed sparse row matrix. Immutable once built; the factories either
// canonicalize (from_triplets) or validate (from_parts) so that every Csr
// handed out by the library satisfies the canonical-form invariants. The
// only escape hatch is unchecked(), which exists so validate() has something
// to look at.
template <class T>
class Csr {
 public:
  using value_type = T;

  Csr() : row_ptr_{0} {}

  static Csr identity(index_t n) {
    Csr m;
    m.n_rows_ = n;
    m.n_cols_ = n;
    m.row_ptr_.resize(static_cast<std::size_t>(n) + 1);
    std::iota(m.row_ptr_.begin(), m.row_ptr_.end(), offset_t{0});
    m.col_idx_.resize(static_cast<std::size_t>(n));
    std::iota(m.col_idx_.begin(), m.col_idx_.end(), index_t{0});
    m.values_.assign(static_cast<std::size_t>(n), T{1});
    return m;
  }

  static Csr empty(index_t n_rows, index_t n_cols) {
    Csr m;
    m.n_rows_ = n_rows;
    m.n_cols_ = n_cols;
    m.row_ptr_.assign(static_cast<std::size_t>(n_rows) + 1, 0);
    return m;
  }

  // Takes ownership of raw arrays; throws if they are not canonical.
  static Csr from_parts(index_t n_rows, index_t n_cols,
                        std::vector<offset_t> row_ptr,
                        std::vector<index_t> col_idx, std::vector<T> values);

  static Csr unchecked(index_t n_rows, index_t n_cols,
                       std::vector<offset_t> row_ptr,
                       std::vector<index_t> col_idx, std::vector<T> values) {
    Csr m;
    m.n_rows_ = n_rows;
    m.n_cols_ = n_cols;
    m.row_ptr_ = std::move(row_ptr);
    m.col_idx_ = std::move(col_idx);
    m.values_ = std::move(values);
    return m;
  }

  index_t n_rows() const noexcept { return n_rows_; }
  index_t n_cols() const noexcept { return n_cols_; }
  offset_t nnz() const noexcept {
    return row_ptr_.empty() ? 0 : row_ptr_.back();
  }

  std::span<const offset_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const index_t> col_idx() const noexcept { return col_idx_; }
  std::span<const T> values() const noexcept { return values_; }

  offset_t row_begin(index_t i) const { return row_ptr_[static_cast<std::size_t>(i)]; }
  offset_t row_end(index_t i) const { return row_ptr_[static_cast<std::size_t>(i) + 1]; }
  offset_t row_length(index_t i) const { return row_end(i) - row_begin(i); }

  std::span<const index_t> row_cols(index_t i) const {
    return std::span<const index_t>(col_idx_).subspan(
        static_cast<std::size_t>(row_begin(i)),
        static_cast<std::size_t>(row_length(i)));
  }
  std::span<const T> row_values(index_t i) const {
    return std::span<const T>(values_).subspan(
        static_cast<std::size_t>(row_begin(i)),
        static_cast<std::size_t>(row_length(i)));
  }

  friend bool operator==(const Csr&, const Csr&) = default;

 private:
  index_t n_rows_ = 0;
  index_t n_cols_ = 0;
  std::vector<offset_t> row_ptr_;
  std::vector<index_t> col_idx_;
  std::vector<T> values_;
};

using CsrMatrix = Csr<double>;

struct Violation {
  std::string rule;
  index_t row = -1;  // -1 when the rule is not tied to a row
  std::string detail;
};

// Empty result iff every canonical-form invariant holds.
template <class T>
std::vector<Violation> validate(const Csr<T>& a) {
  std::vector<Violation> out;
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto vals = a.values();
  if (a.n_rows() < 0 || a.n_cols() < 0) {
    out.push_back({"negative dimension", -1, ""});
    return out;
  }
  if (rp.size() != static_cast<std::size_t>(a.n_rows()) + 1) {
    out.push_back({"row_ptr length", -1,
                   "expected " + std::to_string(a.n_rows() + 1) + ", got " +
                       std::to_string(rp.size())});
    return out;
  }
  if (rp[0] != 0) out.push_back({"row_ptr[0] != 0", 0, ""});
  bool monotone = true;
  for (std::size_t i = 1; i < rp.size(); ++i) {
    if (rp[i] < rp[i - 1]) {
      out.push_back({"non-monotone row_ptr", static_cast<index_t>(i),
                     "row_ptr[" + std::to_string(i) + "] < row_ptr[" +
                         std::to_string(i - 1) + "]"});
      monotone = false;
    }
  }
  if (static_cast<std::size_t>(rp.back()) != ci.size() ||
      ci.size() != vals.size()) {
    out.push_back({"array length", -1,
                   "row_ptr.back()=" + std::to_string(rp.back()) +
                       " col_idx=" + std::to_string(ci.size()) +
                       " values=" + std::to_string(vals.size())});
  }
  for (std::size_t k = 0; k < ci.size(); ++k) {
    if (ci[k] < 0 || ci[k] >= a.n_cols()) {
      // Row of the offending entry, when row_ptr is usable.
      index_t row = -1;
      if (monotone) {
        auto it = std::upper_bound(rp.begin(), rp.end(), static_cast<offset_t>(k));
        row = static_cast<index_t>(std::distance(rp.begin(), it)) - 1;
      }
      out.push_back({"index out of range", row,
                     "col_idx[" + std::to_string(k) + "]=" + std::to_string(ci[k])});
    }
  }
  if (!monotone || static_cast<std::size_t>(rp.back()) > ci.size()) return out;
  for (index_t i = 0; i < a.n_rows(); ++i) {
    for (offset_t k = rp[i] + 1; k < rp[i + 1]; ++k) {
      if (ci[k] == ci[k - 1]) {
        out.push_back({"duplicate entry", i, "col " + std::to_string(ci[k])});
      } else if (ci[k] < ci[k - 1]) {
        out.push_back({"unsorted row", i, "col " + std::to_string(ci[k])});
      }
    }
  }
  return out;
}

template <class T>
Csr<T> Csr<T>::from_parts(index_t n_rows, index_t n_cols,
                          std::vector<offset_t> row_ptr,
                          std::vector<index_t> col_idx, std::vector<T> values) {
  Csr m = unchecked(n_rows, n_cols, std::move(row_ptr), std::move(col_idx),
                    std::move(values));
  auto violations = validate(m);
  if (!violations.empty()) {
    const auto& v = violations.front();
    const bool range = v.rule == "index out of range";
    raise(range ? ErrorKind::IndexOutOfRange : ErrorKind::DimensionMismatch,
          v.rule + " (row " + std::to_string(v.row) + ") " + v.detail);
  }
  return m;
}

// Canonical CSR from coordinate entries; the result does not depend on the
// order of `entries` (stable sort, then duplicates merged in input order).
template <class T>
Csr<T> csr_from_triplets(index_t n_rows, index_t n_cols,
                         std::vector<BasicTriplet<T>> entries,
                         DupPolicy dup_policy = DupPolicy::Sum) {
  if (n_rows < 0 || n_cols < 0) raise(ErrorKind::IndexOutOfRange, "negative dimension");
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols) {
      raise(ErrorKind::IndexOutOfRange,
            "entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                ") outside " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  std::vector<offset_t> row_ptr(static_cast<std::size_t>(n_rows) + 1, 0);
  std::vector<index_t> col_idx;
  std::vector<T> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
      if (dup_policy == DupPolicy::Error) {
        raise(ErrorKind::DuplicateEntry,
              "(" + std::to_string(e.row) + "," + std::to_string(e.col) + ")");
      }
      values.back() += e.value;
      continue;
    }
    col_idx.push_back(e.col);
    values.push_back(e.value);
    ++row_ptr[static_cast<std::size_t>(e.row) + 1];
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return Csr<T>::unchecked(n_rows, n_cols, std::move(row_ptr), std::move(col_idx),
                           std::move(values));
}

template <class T>
std::vector<BasicTriplet<T>> to_triplets(const Csr<T>& a) {
  std::vector<BasicTriplet<T>> out;
  out.reserve(static_cast<std::size_t>(a.nnz()));
  for (index_t i = 0; i < a.n_rows(); ++i) {
    for (offset_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      out.push_back({i, a.col_idx()[k], a.values()[k]});
    }
  }
  return out;
}

// Counting-sort transpose; rows of the result come out sorted because the
// source rows are scanned in ascending order.
template <class T>
Csr<T> transpose(const Csr<T>& a) {
  const auto n_out = static_cast<std::size_t>(a.n_cols());
  std::vector<offset_t> row_ptr(n_out + 1, 0);
  for (index_t c : a.col_idx()) ++row_ptr[static_cast<std::size_t>(c) + 1];
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());

  std::vector<offset_t> cursor(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<index_t> col_idx(static_cast<std::size_t>(a.nnz()));
  std::vector<T> values(static_cast<std::size_t>(a.nnz()));
  for (index_t i = 0; i < a.n_rows(); ++i) {
    for (offset_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      const auto dst = cursor[static_cast<std::size_t>(a.col_idx()[k])]++;
      col_idx[dst] = i;
      values[dst] = a.values()[k];
    }
  }
  return Csr<T>::unchecked(a.n_cols(), a.n_rows(), std::move(row_ptr),
                           std::move(col_idx), std::move(values));
}

template <class T>
T sum_values(const Csr<T>& a) {
  T s{};
  for (T v : a.values()) s += v;
  return s;
}

}  // namespace spk
