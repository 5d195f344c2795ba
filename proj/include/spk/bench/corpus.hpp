#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spk/csr.hpp"
#include "spk/error.hpp"
#include "spk/matrix_market.hpp"
#include "spk/spgemm/engine.hpp"

namespace spk::bench {

struct CorpusEntry {
  std::string name;     // short name used on the command line
  std::string group;    // SuiteSparse group; empty for bundled fixtures
  std::string file;     // file stem: <file>.mtx
  std::int64_t rows = 0;
  std::int64_t nnz = 0;  // after symmetric expansion
  std::int64_t total_ip = 0;
  std::int64_t nnz_a2 = 0;
  bool nnz_a2_informational = false;
  std::string sha256;  // of the downloaded archive; empty when not recorded

  bool bundled() const { return group.empty(); }
  std::string url() const {
    return "https://suitesparse-collection-website.herokuapp.com/MM/" + group + "/" + file +
           ".tar.gz";
  }
};

// Matrix statistics for A * A. The two road/p2p nnz(A^2) figures equal their
// nnz(A), which cannot hold for those graphs, so they are reported but not
// enforced.
inline const std::vector<CorpusEntry>& corpus_registry() {
  static const std::vector<CorpusEntry> entries{
      {"RoadTX", "SNAP", "roadNet-TX", 1393383, 3843320, 12099370, 3843320, true, ""},
      {"p2p-Gnutella04", "SNAP", "p2p-Gnutella04", 10879, 39994, 180230, 39994, true, ""},
      {"amazon0601", "SNAP", "amazon0601", 403394, 3387388, 32373599, 16258436, false, ""},
      {"web-Google", "SNAP", "web-Google", 916428, 5105039, 60687836, 29710164, false, ""},
      {"scircuit", "Hamm", "scircuit", 170998, 958936, 8676313, 5222525, false, ""},
      {"cit-Patents", "SNAP", "cit-Patents", 3774768, 16518948, 82152992, 68848721, false, ""},
      {"Economics", "Williams", "mac_econ_fwd500", 206500, 1273389, 7556897, 6704899, false, ""},
      {"webbase-1M", "Williams", "webbase-1M", 1000005, 3105536, 69524195, 51111996, false, ""},
      {"wb-edu", "Gleich", "wb-edu", 9845725, 57156537, 1559579990, 630077764, false, ""},
      {"cage15", "vanHeukelum", "cage15", 5154859, 99199551, 2078631615, 929023247, false, ""},
      {"Wind-Tunnel", "Boeing", "pwtk", 217918, 11634424, 626054402, 32772236, false, ""},
      {"Protein", "Williams", "pdb1HYS", 36417, 4344765, 555322659, 19594581, false, ""},
      // Small matrices shipped with the test fixtures.
      {"a3", "", "a3", 3, 5, 9, 5, false, ""},
      {"path3", "", "path3", 3, 4, 6, 5, false, ""},
      {"two_cliques", "", "two_cliques", 6, 14, 34, 26, false, ""},
  };
  return entries;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Matches the short name or the file stem, ignoring case; spaces and '-'
// are interchangeable ("wind tunnel", "Wind-Tunnel", "pwtk").
inline std::optional<CorpusEntry> find_entry(std::string_view name) {
  auto norm = [](std::string s) {
    s = lower(std::move(s));
    std::replace(s.begin(), s.end(), ' ', '-');
    return s;
  };
  const auto key = norm(std::string(name));
  for (const auto& e : corpus_registry()) {
    if (norm(e.name) == key || norm(e.file) == key) return e;
  }
  return std::nullopt;
}

// SPGEMM_CORPUS_DIR, else ./corpus.
inline std::filesystem::path corpus_dir() {
  if (const char* env = std::getenv("SPGEMM_CORPUS_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "corpus";
}

// Candidate locations: <dir>/<file>.mtx, then <dir>/<file>/<file>.mtx (the
// layout of an unpacked SuiteSparse archive).
inline std::optional<std::filesystem::path> locate(const CorpusEntry& e,
                                                   const std::vector<std::filesystem::path>& dirs) {
  for (const auto& d : dirs) {
    for (auto p : {d / (e.file + ".mtx"), d / e.file / (e.file + ".mtx")}) {
      if (std::filesystem::is_regular_file(p)) return p;
    }
  }
  return std::nullopt;
}

struct CheckLine {
  std::string what;
  std::int64_t expected = 0;
  std::int64_t actual = 0;
  bool informational = false;
  bool ok() const { return expected == actual; }
};

struct VerifyOutcome {
  std::string name;
  std::filesystem::path path;
  std::vector<CheckLine> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckLine& c) { return c.informational || c.ok(); });
  }
};

// Counts products and output nonzeros of A * A (allocation phase only).
inline VerifyOutcome verify_matrix(const CorpusEntry& e, const CsrMatrix& a,
                                   const SpgemmConfig& config = {}) {
  VerifyOutcome out{e.name, {}, {}};
  out.checks.push_back({"rows", e.rows, a.n_rows(), false});
  out.checks.push_back({"nnz", e.nnz, a.nnz(), false});
  if (a.n_rows() != a.n_cols()) raise(ErrorKind::NotSquare, e.name + " is not square");
  const auto plan = group_rows(count_intermediate_products(a, a), config);
  out.checks.push_back({"total_ip", e.total_ip, plan.total_ip, false});
  const auto row_ptr = allocation_phase(a, a, plan, config);
  out.checks.push_back({"nnz(A^2)", e.nnz_a2, row_ptr.back(), e.nnz_a2_informational});
  return out;
}

// Downloads and unpacks a SuiteSparse archive with the system curl and tar.
inline std::filesystem::path fetch(const CorpusEntry& e, const std::filesystem::path& dir) {
  if (e.bundled()) raise(ErrorKind::DownloadError, e.name + " is bundled, nothing to fetch");
  std::filesystem::create_directories(dir);
  const auto archive = dir / (e.file + ".tar.gz");
  const std::string get = "curl -fsSL --retry 2 -o '" + archive.string() + "' '" + e.url() + "'";
  if (std::system(get.c_str()) != 0) raise(ErrorKind::DownloadError, "download failed: " + e.url());
  if (!e.sha256.empty()) {
    const std::string sum = "echo '" + e.sha256 + "  " + archive.string() + "' | sha256sum -c --quiet";
    if (std::system(sum.c_str()) != 0) raise(ErrorKind::DownloadError, "checksum mismatch: " + archive.string());
  }
  const std::string unpack = "tar -xzf '" + archive.string() + "' -C '" + dir.string() + "'";
  if (std::system(unpack.c_str()) != 0) raise(ErrorKind::DownloadError, "cannot unpack " + archive.string());
  auto found = locate(e, {dir});
  if (!found) raise(ErrorKind::DownloadError, "archive did not contain " + e.file + ".mtx");
  return *found;
}

}  // namespace spk::bench
