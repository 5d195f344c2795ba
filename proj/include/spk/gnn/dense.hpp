#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"

namespace spk::gnn {

// Row-major dense matrix of doubles.
struct DenseMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<double> v;

  DenseMatrix() = default;
  DenseMatrix(index_t r, index_t c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  double& at(index_t i, index_t j) { return v[static_cast<std::size_t>(i) * cols + j]; }
  double at(index_t i, index_t j) const { return v[static_cast<std::size_t>(i) * cols + j]; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) {
    raise(ErrorKind::DimensionMismatch, "dense product " + std::to_string(a.rows) + "x" +
                                            std::to_string(a.cols) + " * " +
                                            std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
  DenseMatrix c(a.rows, b.cols);
  for (index_t i = 0; i < a.rows; ++i) {
    for (index_t k = 0; k < a.cols; ++k) {
      const double x = a.at(i, k);
      for (index_t j = 0; j < b.cols; ++j) c.at(i, j) += x * b.at(k, j);
    }
  }
  return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols, a.rows);
  for (index_t i = 0; i < a.rows; ++i) {
    for (index_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  }
  return t;
}

inline DenseMatrix to_dense(const CsrMatrix& a) {
  DenseMatrix d(a.n_rows(), a.n_cols());
  for (index_t i = 0; i < a.n_rows(); ++i) {
    for (offset_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      d.at(i, a.col_idx()[k]) += a.values()[k];
    }
  }
  return d;
}

// Every entry becomes a stored entry, zeros included.
inline CsrMatrix to_csr(const DenseMatrix& d) {
  std::vector<offset_t> rp(static_cast<std::size_t>(d.rows) + 1);
  std::vector<index_t> ci;
  ci.reserve(d.v.size());
  for (index_t i = 0; i < d.rows; ++i) {
    for (index_t j = 0; j < d.cols; ++j) ci.push_back(j);
    rp[static_cast<std::size_t>(i) + 1] = static_cast<offset_t>(ci.size());
  }
  return CsrMatrix::unchecked(d.rows, d.cols, std::move(rp), std::move(ci), d.v);
}

}  // namespace spk::gnn
