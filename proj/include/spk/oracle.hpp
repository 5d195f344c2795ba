#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"

namespace spk {

// Reference row-wise product. Each output row is built by listing every
// intermediate product, stable-sorting by column and summing runs, so it
// shares no code with the hash engine. Accumulated zeros stay in the
// structure, the same as in the engine.
template <class T>
Csr<T> oracle_spgemm(const Csr<T>& a, const Csr<T>& b) {
  if (a.n_cols() != b.n_rows()) {
    raise(ErrorKind::DimensionMismatch,
          "A is " + std::to_string(a.n_rows()) + "x" + std::to_string(a.n_cols()) +
              ", B is " + std::to_string(b.n_rows()) + "x" + std::to_string(b.n_cols()));
  }
  std::vector<offset_t> row_ptr(static_cast<std::size_t>(a.n_rows()) + 1, 0);
  std::vector<index_t> col_idx;
  std::vector<T> values;
  std::vector<std::pair<index_t, T>> products;
  for (index_t i = 0; i < a.n_rows(); ++i) {
    products.clear();
    for (offset_t ka = a.row_begin(i); ka < a.row_end(i); ++ka) {
      const index_t k = a.col_idx()[ka];
      const T av = a.values()[ka];
      for (offset_t kb = b.row_begin(k); kb < b.row_end(k); ++kb) {
        products.emplace_back(b.col_idx()[kb], av * b.values()[kb]);
      }
    }
    std::stable_sort(products.begin(), products.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t p = 0; p < products.size();) {
      const index_t col = products[p].first;
      T sum{};
      for (; p < products.size() && products[p].first == col; ++p) sum += products[p].second;
      col_idx.push_back(col);
      values.push_back(sum);
    }
    row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<offset_t>(col_idx.size());
  }
  return Csr<T>::unchecked(a.n_rows(), b.n_cols(), std::move(row_ptr), std::move(col_idx),
                           std::move(values));
}

}  // namespace spk
