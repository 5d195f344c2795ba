#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"
#include "spk/gnn/dense.hpp"
#include "spk/spgemm/engine.hpp"

namespace spk::gnn {

// Binary mask with the shape of its source matrix.
struct TopKMask {
  index_t rows = 0;
  index_t cols = 0;
  std::int64_t k = 0;
  bool global = false;
  std::vector<std::uint8_t> bits;

  bool at(index_t i, index_t j) const { return bits[static_cast<std::size_t>(i) * cols + j] != 0; }

  static TopKMask filled(index_t rows, index_t cols, bool on) {
    return {rows, cols, on ? cols : 0, false,
            std::vector<std::uint8_t>(static_cast<std::size_t>(rows) * cols, on ? 1 : 0)};
  }
};

// Per-row top-k by value; equal values keep the smaller column. With
// `global`, the n_rows * k largest entries of the whole matrix are kept
// (ties to the smaller row-major position).
inline TopKMask topk_mask(const DenseMatrix& x, std::int64_t k, bool global = false) {
  if (k < 1) raise(ErrorKind::BadConfig, "k must be >= 1");
  TopKMask m{x.rows, x.cols, k, global, std::vector<std::uint8_t>(x.v.size(), 0)};
  auto by_value = [&](std::size_t p, std::size_t q) { return x.v[p] > x.v[q]; };
  std::vector<std::size_t> order;
  if (global) {
    order.resize(x.v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), by_value);
    const auto keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(x.rows) *
                                                               static_cast<std::size_t>(k));
    for (std::size_t t = 0; t < keep; ++t) m.bits[order[t]] = 1;
    return m;
  }
  const auto keep = static_cast<std::size_t>(std::min<std::int64_t>(k, x.cols));
  for (index_t i = 0; i < x.rows; ++i) {
    order.resize(static_cast<std::size_t>(x.cols));
    std::iota(order.begin(), order.end(), static_cast<std::size_t>(i) * x.cols);
    std::stable_sort(order.begin(), order.end(), by_value);
    for (std::size_t t = 0; t < keep; ++t) m.bits[order[t]] = 1;
  }
  return m;
}

// X ⊙ M as CSR. Selected entries are stored even when their value is 0.
inline CsrMatrix masked_to_csr(const DenseMatrix& x, const TopKMask& mask) {
  std::vector<offset_t> rp(static_cast<std::size_t>(x.rows) + 1);
  std::vector<index_t> ci;
  std::vector<double> vals;
  for (index_t i = 0; i < x.rows; ++i) {
    for (index_t j = 0; j < x.cols; ++j) {
      if (!mask.at(i, j)) continue;
      ci.push_back(j);
      vals.push_back(x.at(i, j));
    }
    rp[static_cast<std::size_t>(i) + 1] = static_cast<offset_t>(ci.size());
  }
  return CsrMatrix::unchecked(x.rows, x.cols, std::move(rp), std::move(ci), std::move(vals));
}

namespace detail {

inline void check_mask(const DenseMatrix& x, const TopKMask& mask) {
  if (mask.rows != x.rows || mask.cols != x.cols) {
    raise(ErrorKind::DimensionMismatch, "mask shape does not match features");
  }
}

}  // namespace detail

// X_l = A · (X_prev ⊙ M) · W with M supplied by the caller.
inline DenseMatrix forward_masked(const CsrMatrix& a, const DenseMatrix& x_prev,
                                  const DenseMatrix& w, const TopKMask& mask,
                                  const SpgemmConfig& config = {}) {
  if (a.n_cols() != x_prev.rows || x_prev.cols != w.rows) {
    raise(ErrorKind::DimensionMismatch, "forward: A is " + std::to_string(a.n_rows()) + "x" +
                                            std::to_string(a.n_cols()) + ", X is " +
                                            std::to_string(x_prev.rows) + "x" +
                                            std::to_string(x_prev.cols) + ", W is " +
                                            std::to_string(w.rows) + "x" + std::to_string(w.cols));
  }
  detail::check_mask(x_prev, mask);
  const CsrMatrix aggregated = spgemm(a, masked_to_csr(x_prev, mask), config).matrix;
  return matmul(to_dense(aggregated), w);
}

struct ForwardResult {
  DenseMatrix x;
  TopKMask mask;
};

inline ForwardResult forward(const CsrMatrix& a, const DenseMatrix& x_prev, const DenseMatrix& w,
                             std::int64_t k, bool global = false, const SpgemmConfig& config = {}) {
  TopKMask mask = topk_mask(x_prev, k, global);
  DenseMatrix x = forward_masked(a, x_prev, w, mask, config);
  return {std::move(x), std::move(mask)};
}

// dL/dX_prev = M ⊙ (Aᵀ · dL/dX_l · Wᵀ), the Aᵀ product through the engine.
inline DenseMatrix backward(const CsrMatrix& a, const DenseMatrix& d_xl, const DenseMatrix& w,
                            const TopKMask& mask, const SpgemmConfig& config = {}) {
  if (d_xl.rows != a.n_rows() || d_xl.cols != w.cols) {
    raise(ErrorKind::DimensionMismatch, "backward: upstream gradient shape does not match A and W");
  }
  const DenseMatrix projected = matmul(d_xl, transpose(w));
  DenseMatrix g = to_dense(spgemm(spk::transpose(a), to_csr(projected), config).matrix);
  detail::check_mask(g, mask);
  for (std::size_t p = 0; p < g.v.size(); ++p) {
    if (!mask.bits[p]) g.v[p] = 0.0;
  }
  return g;
}

// Loss used by the gradient check: L = ½ Σ (X_l - G)².
inline double quadratic_loss(const DenseMatrix& x, const DenseMatrix& target) {
  double s = 0;
  for (std::size_t p = 0; p < x.v.size(); ++p) {
    const double d = x.v[p] - target.v[p];
    s += 0.5 * d * d;
  }
  return s;
}

struct GradientCheck {
  double max_rel_error = 0;  // over masked coordinates
  std::int64_t masked_checked = 0;
  std::int64_t unmasked_nonzero = 0;  // analytic gradient entries off the mask that are not 0
};

// Central differences with the mask held fixed. Relative error per
// coordinate is |analytic - numeric| / max(|analytic|, |numeric|, 1).
inline GradientCheck gradient_check(const CsrMatrix& a, const DenseMatrix& x_prev,
                                    const DenseMatrix& w, const DenseMatrix& target,
                                    std::int64_t k, double step, bool global = false,
                                    const SpgemmConfig& config = {}) {
  if (!(step > 0)) raise(ErrorKind::BadConfig, "step must be > 0");
  const auto fwd = forward(a, x_prev, w, k, global, config);
  DenseMatrix d_xl = fwd.x;
  for (std::size_t p = 0; p < d_xl.v.size(); ++p) d_xl.v[p] -= target.v[p];
  const DenseMatrix grad = backward(a, d_xl, w, fwd.mask, config);

  GradientCheck out;
  DenseMatrix probe = x_prev;
  for (std::size_t p = 0; p < probe.v.size(); ++p) {
    if (!fwd.mask.bits[p]) {
      if (grad.v[p] != 0.0) ++out.unmasked_nonzero;
      continue;
    }
    const double saved = probe.v[p];
    probe.v[p] = saved + step;
    const double up = quadratic_loss(forward_masked(a, probe, w, fwd.mask, config), target);
    probe.v[p] = saved - step;
    const double down = quadratic_loss(forward_masked(a, probe, w, fwd.mask, config), target);
    probe.v[p] = saved;
    const double numeric = (up - down) / (2 * step);
    const double scale = std::max({std::abs(grad.v[p]), std::abs(numeric), 1.0});
    out.max_rel_error = std::max(out.max_rel_error, std::abs(grad.v[p] - numeric) / scale);
    ++out.masked_checked;
  }
  return out;
}

// A random check instance: symmetric 0/1 graph with self-loops, features
// and weights in [-1, 1].
struct GradientInstance {
  CsrMatrix a;
  DenseMatrix x;
  DenseMatrix w;
  DenseMatrix target;
};

inline GradientInstance random_instance(std::uint64_t seed, index_t n, index_t f,
                                        index_t f_out = 0, double density = 0.3) {
  if (n < 1 || f < 1) raise(ErrorKind::BadConfig, "instance needs n >= 1 and f >= 1");
  if (f_out < 1) f_out = f;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(density);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (index_t i = 0; i < n; ++i) {
    t.push_back({i, i, 1.0});
    for (index_t j = i + 1; j < n; ++j) {
      if (!edge(rng)) continue;
      t.push_back({i, j, 1.0});
      t.push_back({j, i, 1.0});
    }
  }
  GradientInstance g{csr_from_triplets(n, n, std::move(t)), DenseMatrix(n, f), DenseMatrix(f, f_out),
                     DenseMatrix(n, f_out)};
  for (auto* m : {&g.x, &g.w, &g.target}) {
    for (auto& v : m->v) v = u(rng);
  }
  return g;
}

}  // namespace spk::gnn
