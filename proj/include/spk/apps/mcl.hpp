#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"
#include "spk/spgemm/engine.hpp"

namespace spk {

// Column operations below work on the transpose, where a column is a row.

template <class T>
void check_nonnegative(const Csr<T>& m) {
  for (T v : m.values()) {
    if (v < T{0}) raise(ErrorKind::NegativeEntry, "negative entry " + std::to_string(v));
  }
}

// Scales every nonzero column to sum 1. Empty and all-zero columns are left alone.
template <class T>
Csr<T> column_normalize(const Csr<T>& m) {
  check_nonnegative(m);
  std::vector<T> sums(static_cast<std::size_t>(m.n_cols()), T{0});
  const auto cols = m.col_idx();
  const auto vals = m.values();
  for (std::size_t k = 0; k < vals.size(); ++k) sums[static_cast<std::size_t>(cols[k])] += vals[k];
  std::vector<T> out(vals.begin(), vals.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const T s = sums[static_cast<std::size_t>(cols[k])];
    if (s > T{0}) out[k] /= s;
  }
  const auto rp = m.row_ptr();
  return Csr<T>::unchecked(m.n_rows(), m.n_cols(), {rp.begin(), rp.end()},
                           {cols.begin(), cols.end()}, std::move(out));
}

// Per column: drop entries below theta, then keep the k largest survivors.
// Equal values keep the smaller row index.
template <class T>
Csr<T> prune_columns(const Csr<T>& m, T theta, std::int64_t k) {
  const Csr<T> t = transpose(m);
  std::vector<BasicTriplet<T>> kept;
  std::vector<offset_t> order;
  for (index_t j = 0; j < t.n_rows(); ++j) {
    order.clear();
    for (offset_t q = t.row_begin(j); q < t.row_end(j); ++q) {
      if (!(t.values()[q] < theta)) order.push_back(q);
    }
    if (static_cast<std::int64_t>(order.size()) > k) {
      std::stable_sort(order.begin(), order.end(),
                       [&](offset_t x, offset_t y) { return t.values()[x] > t.values()[y]; });
      order.resize(static_cast<std::size_t>(std::max<std::int64_t>(k, 0)));
    }
    for (offset_t q : order) kept.push_back({t.col_idx()[q], j, t.values()[q]});
  }
  return csr_from_triplets(m.n_rows(), m.n_cols(), std::move(kept));
}

template <class T>
Csr<T> inflate(const Csr<T>& m, T r) {
  std::vector<T> vals(m.values().begin(), m.values().end());
  for (auto& v : vals) v = std::pow(v, r);
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  return Csr<T>::unchecked(m.n_rows(), m.n_cols(), {rp.begin(), rp.end()}, {ci.begin(), ci.end()},
                           std::move(vals));
}

// Adds a unit diagonal entry wherever none is stored.
template <class T>
Csr<T> add_self_loops(const Csr<T>& g) {
  auto entries = to_triplets(g);
  std::vector<char> has(static_cast<std::size_t>(g.n_rows()), 0);
  for (const auto& e : entries) {
    if (e.row == e.col) has[static_cast<std::size_t>(e.row)] = 1;
  }
  for (index_t i = 0; i < g.n_rows(); ++i) {
    if (!has[static_cast<std::size_t>(i)]) entries.push_back({i, i, T{1}});
  }
  return csr_from_triplets(g.n_rows(), g.n_cols(), std::move(entries));
}

// Largest |x - y| over the union of both supports.
template <class T>
T max_abs_diff(const Csr<T>& x, const Csr<T>& y) {
  T worst{0};
  for (index_t i = 0; i < x.n_rows(); ++i) {
    offset_t p = x.row_begin(i), q = y.row_begin(i);
    while (p < x.row_end(i) || q < y.row_end(i)) {
      const index_t cx = p < x.row_end(i) ? x.col_idx()[p] : std::numeric_limits<index_t>::max();
      const index_t cy = q < y.row_end(i) ? y.col_idx()[q] : std::numeric_limits<index_t>::max();
      T d;
      if (cx == cy) {
        d = std::abs(x.values()[p++] - y.values()[q++]);
      } else if (cx < cy) {
        d = std::abs(x.values()[p++]);
      } else {
        d = std::abs(y.values()[q++]);
      }
      worst = std::max(worst, d);
    }
  }
  return worst;
}

// Largest |column sum - 1| over columns that hold any mass.
template <class T>
T column_stochastic_error(const Csr<T>& m) {
  std::vector<T> sums(static_cast<std::size_t>(m.n_cols()), T{0});
  for (std::size_t k = 0; k < m.values().size(); ++k) {
    sums[static_cast<std::size_t>(m.col_idx()[k])] += m.values()[k];
  }
  T worst{0};
  for (T s : sums) {
    if (s != T{0}) worst = std::max(worst, std::abs(s - T{1}));
  }
  return worst;
}

struct ClusterAssignment {
  std::vector<index_t> cluster_of_node;
  index_t n_clusters = 0;
};

// Connected components of the support of M + M^T. IDs are dense and follow
// the smallest node of each component.
template <class T>
ClusterAssignment support_components(const Csr<T>& m) {
  const auto n = static_cast<std::size_t>(m.n_rows());
  std::vector<index_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](index_t x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (index_t i = 0; i < m.n_rows(); ++i) {
    for (index_t j : m.row_cols(i)) {
      const index_t a = find(i), b = find(j);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }
  ClusterAssignment out;
  out.cluster_of_node.assign(n, -1);
  std::vector<index_t> id_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(find(static_cast<index_t>(i)));
    if (id_of_root[r] < 0) id_of_root[r] = out.n_clusters++;
    out.cluster_of_node[i] = id_of_root[r];
  }
  return out;
}

struct MclParams {
  int e = 2;
  double r = 2.0;
  double theta = 1e-4;
  std::int64_t k = std::numeric_limits<std::int64_t>::max();
  int max_iter = 100;
  double eps = 1e-6;
  SpgemmConfig engine{};

  void check() const {
    if (e < 2) raise(ErrorKind::BadConfig, "expansion exponent must be >= 2");
    if (!(r > 1.0)) raise(ErrorKind::BadConfig, "inflation exponent must be > 1");
    if (!(theta >= 0.0)) raise(ErrorKind::BadConfig, "pruning threshold must be >= 0");
    if (k < 1) raise(ErrorKind::BadConfig, "top-k must be >= 1");
    if (max_iter < 1) raise(ErrorKind::BadConfig, "max_iter must be >= 1");
    if (!(eps > 0.0)) raise(ErrorKind::BadConfig, "eps must be > 0");
  }
};

struct MclResult {
  ClusterAssignment clusters;
  int iterations = 0;
  bool converged = false;
  double last_change = 0;
  double worst_column_error = 0;  // over all iterations
  CsrMatrix matrix;               // final iterate
};

// Column tolerance asserted after each normalize step.
inline constexpr double kMclColumnTolerance = 1e-9;

// Order per iteration: expand, prune, inflate, normalize.
inline MclResult mcl(const CsrMatrix& g, const MclParams& p = {}) {
  p.check();
  if (g.n_rows() != g.n_cols()) {
    raise(ErrorKind::NotSquare, "graph is " + std::to_string(g.n_rows()) + "x" +
                                    std::to_string(g.n_cols()));
  }
  check_nonnegative(g);

  MclResult out;
  CsrMatrix a = column_normalize(add_self_loops(g));
  for (int it = 1; it <= p.max_iter; ++it) {
    CsrMatrix b = a;
    for (int s = 1; s < p.e; ++s) b = spgemm(b, a, p.engine).matrix;
    CsrMatrix next = column_normalize(inflate(prune_columns(b, p.theta, p.k), p.r));

    const double err = column_stochastic_error(next);
    out.worst_column_error = std::max(out.worst_column_error, err);
    if (err > kMclColumnTolerance) {
      raise(ErrorKind::MismatchError,
            "iteration " + std::to_string(it) + ": column sum off by " + std::to_string(err));
    }
    out.last_change = max_abs_diff(next, a);
    out.iterations = it;
    a = std::move(next);
    if (out.last_change < p.eps) {
      out.converged = true;
      break;
    }
  }
  out.clusters = support_components(a);
  out.matrix = std::move(a);
  return out;
}

// One line per node: "<node> <cluster>", both 0-based.
inline void write_clusters(std::ostream& out, const ClusterAssignment& c) {
  for (std::size_t i = 0; i < c.cluster_of_node.size(); ++i) {
    out << i << ' ' << c.cluster_of_node[i] << '\n';
  }
}

}  // namespace spk
