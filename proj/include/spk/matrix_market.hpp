#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"

namespace spk {

enum class MmField { Real, Integer, Pattern };
enum class MmSymmetry { General, Symmetric };

struct MmHeader {
  MmField field = MmField::Real;
  MmSymmetry symmetry = MmSymmetry::General;
  index_t n_rows = 0;
  index_t n_cols = 0;
  offset_t n_entries = 0;  // as declared on the size line (before expansion)
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Cursor over an in-memory file. Tracks line numbers for error messages.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

inline const char* skip_ws(const char* p, const char* end) {
  while (p < end && (*p == ' ' || *p == '\t')) ++p;
  return p;
}

template <class Int>
bool parse_int(const char*& p, const char* end, Int& out) {
  p = skip_ws(p, end);
  auto [next, ec] = std::from_chars(p, end, out);
  if (ec != std::errc{}) return false;
  p = next;
  return true;
}

inline bool parse_real(const char*& p, const char* end, double& out) {
  p = skip_ws(p, end);
  auto [next, ec] = std::from_chars(p, end, out);
  if (ec != std::errc{}) return false;
  p = next;
  return true;
}

[[noreturn]] inline void parse_fail(const std::string& source, std::size_t line,
                                    const std::string& what) {
  raise(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace detail

inline MmHeader parse_matrix_market_banner(std::string_view banner,
                                           const std::string& source = "<input>") {
  std::istringstream in{std::string(banner)};
  std::string tag, object, format, field, symmetry;
  in >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") detail::parse_fail(source, 1, "missing %%MatrixMarket banner");
  if (detail::lower(object) != "matrix") {
    raise(ErrorKind::UnsupportedFormat, "object '" + object + "'");
  }
  const auto fmt = detail::lower(format);
  if (fmt == "array") raise(ErrorKind::UnsupportedFormat, "array format");
  if (fmt != "coordinate") detail::parse_fail(source, 1, "unknown format '" + format + "'");

  MmHeader h;
  const auto fld = detail::lower(field);
  if (fld == "real" || fld == "double") {
    h.field = MmField::Real;
  } else if (fld == "integer") {
    h.field = MmField::Integer;
  } else if (fld == "pattern") {
    h.field = MmField::Pattern;
  } else if (fld == "complex") {
    raise(ErrorKind::UnsupportedFormat, "complex field");
  } else {
    detail::parse_fail(source, 1, "unknown field '" + field + "'");
  }
  const auto sym = detail::lower(symmetry);
  if (sym == "general") {
    h.symmetry = MmSymmetry::General;
  } else if (sym == "symmetric") {
    h.symmetry = MmSymmetry::Symmetric;
  } else if (sym == "skew-symmetric" || sym == "hermitian") {
    raise(ErrorKind::UnsupportedFormat, "symmetry '" + symmetry + "'");
  } else {
    detail::parse_fail(source, 1, "unknown symmetry '" + symmetry + "'");
  }
  return h;
}

// Parses Matrix Market coordinate text. Symmetric storage is expanded by
// mirroring strictly-lower entries; pattern entries get value 1. When
// `symmetrize` is set, a general matrix is also mirrored (A + A^T pattern,
// diagonal untouched, coinciding entries summed).
inline CsrMatrix parse_matrix_market(std::string_view text, bool symmetrize = false,
                                     const std::string& source = "<input>") {
  detail::LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) detail::parse_fail(source, 1, "empty input");
  MmHeader h = parse_matrix_market_banner(line, source);

  bool have_size = false;
  while (reader.next(line)) {
    const char* p = detail::skip_ws(line.data(), line.data() + line.size());
    if (p == line.data() + line.size() || *p == '%') continue;
    const char* end = line.data() + line.size();
    if (!detail::parse_int(p, end, h.n_rows) || !detail::parse_int(p, end, h.n_cols) ||
        !detail::parse_int(p, end, h.n_entries)) {
      detail::parse_fail(source, reader.line_no(), "bad size line");
    }
    have_size = true;
    break;
  }
  if (!have_size) detail::parse_fail(source, reader.line_no(), "missing size line");
  if (h.n_rows < 0 || h.n_cols < 0 || h.n_entries < 0) {
    detail::parse_fail(source, reader.line_no(), "negative size");
  }
  if (h.symmetry == MmSymmetry::Symmetric && h.n_rows != h.n_cols) {
    detail::parse_fail(source, reader.line_no(), "symmetric matrix must be square");
  }

  const bool mirror = h.symmetry == MmSymmetry::Symmetric || symmetrize;
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(h.n_entries) * (mirror ? 2 : 1));
  offset_t seen = 0;
  while (reader.next(line)) {
    const char* p = line.data();
    const char* end = line.data() + line.size();
    p = detail::skip_ws(p, end);
    if (p == end || *p == '%') continue;
    index_t r = 0, c = 0;
    double v = 1.0;
    if (!detail::parse_int(p, end, r) || !detail::parse_int(p, end, c)) {
      detail::parse_fail(source, reader.line_no(), "bad entry indices");
    }
    if (h.field == MmField::Integer) {
      std::int64_t iv = 0;
      if (!detail::parse_int(p, end, iv)) {
        detail::parse_fail(source, reader.line_no(), "bad integer value");
      }
      v = static_cast<double>(iv);
    } else if (h.field == MmField::Real) {
      if (!detail::parse_real(p, end, v)) {
        detail::parse_fail(source, reader.line_no(), "bad real value");
      }
    }
    if (detail::skip_ws(p, end) != end) {
      detail::parse_fail(source, reader.line_no(), "trailing characters");
    }
    if (r < 1 || r > h.n_rows || c < 1 || c > h.n_cols) {
      detail::parse_fail(source, reader.line_no(),
                         "entry (" + std::to_string(r) + "," + std::to_string(c) +
                             ") out of range");
    }
    if (++seen > h.n_entries) {
      detail::parse_fail(source, reader.line_no(), "more entries than declared");
    }
    entries.push_back({r - 1, c - 1, v});
    if (mirror && r != c) entries.push_back({c - 1, r - 1, v});
  }
  if (seen != h.n_entries) {
    detail::parse_fail(source, reader.line_no(),
                       "declared " + std::to_string(h.n_entries) + " entries, found " +
                           std::to_string(seen));
  }
  return csr_from_triplets(h.n_rows, h.n_cols, std::move(entries), DupPolicy::Sum);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::IoError, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

inline CsrMatrix load_matrix_market(const std::filesystem::path& path,
                                    bool symmetrize = false) {
  return parse_matrix_market(read_file(path), symmetrize, path.string());
}

inline void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n_rows() << ' ' << a.n_cols() << ' ' << a.nnz() << '\n';
  char buf[64];
  for (index_t i = 0; i < a.n_rows(); ++i) {
    for (offset_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      auto res = std::to_chars(buf, buf + sizeof buf, a.values()[k]);
      out << (i + 1) << ' ' << (a.col_idx()[k] + 1) << ' '
          << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    }
  }
}

inline void save_matrix_market(const std::filesystem::path& path, const CsrMatrix& a) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::IoError, "cannot write " + path.string());
  write_matrix_market(out, a);
}

// Binary cache: "CSR1", u64 n_rows, u64 n_cols, u64 nnz, then row_ptr (u64),
// col_idx (u32), values (f64); all little-endian.
namespace detail {

template <class U>
void put_le(std::ostream& out, U v) {
  static_assert(std::endian::native == std::endian::little,
                "binary CSR cache assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class U>
U get_le(std::istream& in) {
  U v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) raise(ErrorKind::ParseError, "truncated binary CSR");
  return v;
}

}  // namespace detail

inline void save_binary_csr(const std::filesystem::path& path, const CsrMatrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::IoError, "cannot write " + path.string());
  out.write("CSR1", 4);
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.n_rows()));
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.n_cols()));
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.nnz()));
  for (auto p : a.row_ptr()) detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(p));
  for (auto c : a.col_idx()) detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c));
  for (auto v : a.values()) detail::put_le<double>(out, v);
}

inline CsrMatrix load_binary_csr(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::IoError, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CSR1", 4) != 0) {
    raise(ErrorKind::ParseError, path.string() + ": bad magic");
  }
  const auto n_rows = detail::get_le<std::uint64_t>(in);
  const auto n_cols = detail::get_le<std::uint64_t>(in);
  const auto nnz = detail::get_le<std::uint64_t>(in);
  std::vector<offset_t> row_ptr(n_rows + 1);
  std::vector<index_t> col_idx(nnz);
  std::vector<double> values(nnz);
  for (auto& p : row_ptr) p = static_cast<offset_t>(detail::get_le<std::uint64_t>(in));
  for (auto& c : col_idx) c = static_cast<index_t>(detail::get_le<std::uint32_t>(in));
  for (auto& v : values) v = detail::get_le<double>(in);
  return CsrMatrix::from_parts(static_cast<index_t>(n_rows), static_cast<index_t>(n_cols),
                               std::move(row_ptr), std::move(col_idx), std::move(values));
}

}  // namespace spk
