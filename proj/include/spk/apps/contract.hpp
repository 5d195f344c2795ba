#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"
#include "spk/spgemm/engine.hpp"

namespace spk {

// labels are 1-based: node j belongs to group labels[j]. S is m x n with
// S[labels[j] - 1, j] = 1, where m = max label.
inline CsrMatrix build_selector(const std::vector<std::int64_t>& labels, index_t n) {
  if (static_cast<std::size_t>(n) != labels.size()) {
    raise(ErrorKind::DimensionMismatch, std::to_string(labels.size()) + " labels for " +
                                            std::to_string(n) + " nodes");
  }
  std::int64_t m = 0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 1 || labels[j] > std::numeric_limits<index_t>::max()) {
      raise(ErrorKind::LabelOutOfRange,
            "label " + std::to_string(labels[j]) + " at node " + std::to_string(j));
    }
    m = std::max(m, labels[j]);
  }
  std::vector<Triplet> entries;
  entries.reserve(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    entries.push_back({static_cast<index_t>(labels[j] - 1), static_cast<index_t>(j), 1.0});
  }
  return csr_from_triplets(static_cast<index_t>(m), n, std::move(entries));
}

// C = S * G * S^T as two engine products.
inline CsrMatrix graph_contract(const CsrMatrix& g, const std::vector<std::int64_t>& labels,
                                const SpgemmConfig& config = {}) {
  if (g.n_rows() != g.n_cols()) {
    raise(ErrorKind::NotSquare, "graph is " + std::to_string(g.n_rows()) + "x" +
                                    std::to_string(g.n_cols()));
  }
  const CsrMatrix s = build_selector(labels, g.n_rows());
  const CsrMatrix sg = spgemm(s, g, config).matrix;
  return spgemm(sg, transpose(s), config).matrix;
}

// Reads whitespace-separated 1-based labels.
inline std::vector<std::int64_t> parse_labels(std::string_view text) {
  std::vector<std::int64_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec != std::errc{}) {
      raise(ErrorKind::ParseError, "bad label near offset " + std::to_string(pos));
    }
    out.push_back(v);
    pos = static_cast<std::size_t>(ptr - text.data());
  }
  return out;
}

}  // namespace spk
