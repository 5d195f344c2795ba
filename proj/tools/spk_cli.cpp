// spk: command-line front end for the SpGEMM engine, the access simulator
// and the graph/GNN workloads.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spk/aia/compare.hpp"
#include "spk/apps/contract.hpp"
#include "spk/apps/mcl.hpp"
#include "spk/bench/corpus.hpp"
#include "spk/bench/report.hpp"
#include "spk/gnn/pruned_propagation.hpp"
#include "spk/matrix_market.hpp"
#include "spk/oracle.hpp"
#include "spk/spgemm/engine.hpp"

#ifndef SPK_FIXTURE_DIR
#define SPK_FIXTURE_DIR ""
#endif

namespace {

namespace fs = std::filesystem;
using namespace spk;
using bench::BenchReport;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitInput = 2;

struct Globals {
  unsigned workers = 0;
  std::uint64_t seed = 1;
  std::string json_path;
  std::string csv_path;
  bool verify = false;
};

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

bench::InputInfo describe(const std::string& name, const CsrMatrix& a) {
  return {name, a.n_rows(), a.n_cols(), a.nnz()};
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::IoError, "cannot write " + path);
  out << text;
}

void emit(const Globals& g, const BenchReport& r) {
  if (!g.json_path.empty()) write_text(g.json_path, bench::to_json(r).dump(2) + "\n");
  if (!g.csv_path.empty()) write_text(g.csv_path, bench::to_csv(r));
}

SpgemmConfig engine_config(const Globals& g, bool shared, bool bitonic) {
  SpgemmConfig c;
  c.worker_count = g.workers;
  c.shared_table_mode = shared;
  c.bitonic_sort = bitonic;
  return c;
}

// Structure must match exactly; values within `tol` relative.
bool matches_oracle(const CsrMatrix& got, const CsrMatrix& want, double tol, std::string& why) {
  if (got.n_rows() != want.n_rows() || got.n_cols() != want.n_cols()) {
    why = "shape differs";
    return false;
  }
  if (!std::equal(got.row_ptr().begin(), got.row_ptr().end(), want.row_ptr().begin(),
                  want.row_ptr().end()) ||
      !std::equal(got.col_idx().begin(), got.col_idx().end(), want.col_idx().begin(),
                  want.col_idx().end())) {
    why = "structure differs";
    return false;
  }
  for (std::size_t k = 0; k < got.values().size(); ++k) {
    const double x = got.values()[k], y = want.values()[k];
    const double scale = std::max(std::abs(x), std::abs(y));
    if (scale > 0 && std::abs(x - y) / scale > tol) {
      why = "value " + std::to_string(k) + " differs: " + std::to_string(x) + " vs " +
            std::to_string(y);
      return false;
    }
  }
  return true;
}

// ---- spgemm ---------------------------------------------------------------

struct SpgemmArgs {
  std::vector<std::string> inputs;
  std::string out;
  bool no_warmup = false;
  bool shared = false;
  bool bitonic = false;
};

int cmd_spgemm(const Globals& g, const SpgemmArgs& args) {
  const CsrMatrix a = load_matrix_market(args.inputs.at(0));
  const CsrMatrix b = args.inputs.size() > 1 ? load_matrix_market(args.inputs[1]) : a;
  const auto config = engine_config(g, args.shared, args.bitonic);
  if (!args.no_warmup) (void)spgemm(a, b, config);
  const auto result = spgemm(a, b, config);

  std::string name = stem(args.inputs[0]);
  if (args.inputs.size() > 1) name += "*" + stem(args.inputs[1]);
  BenchReport r;
  r.command = "spgemm";
  r.run_id = bench::make_run_id(r.command, name, g.seed);
  r.input = describe(name, a);
  r.workers = config.resolved_workers();
  r.seed = g.seed;
  r.results.push_back({"hash-engine", "", "", result.stats, std::nullopt, std::nullopt});
  r.extra["shared_table_mode"] = args.shared;
  r.extra["bitonic_sort"] = args.bitonic;

  int code = kExitOk;
  if (g.verify) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto want = oracle_spgemm(a, b);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.results.push_back({"naive-oracle", "", "", std::nullopt, std::nullopt, secs});
    std::string why;
    const bool ok = matches_oracle(result.matrix, want, 1e-12, why);
    r.verify = ok ? "pass" : "fail";
    if (!ok) {
      std::cerr << "verify: " << why << '\n';
      code = kExitVerify;
    }
  }
  if (!args.out.empty()) save_matrix_market(args.out, result.matrix);

  const auto& s = result.stats;
  std::cout << name << ": rows=" << a.n_rows() << " nnz=" << a.nnz() << " total_ip=" << s.total_ip
            << " nnz_out=" << s.nnz_out << " seconds=" << s.total_seconds()
            << " gflops=" << bench::round3(s.flops() / 1e9);
  if (g.verify) std::cout << " verify=" << r.verify;
  std::cout << '\n';
  emit(g, r);
  return code;
}

// ---- aia ------------------------------------------------------------------

struct AiaArgs {
  std::string input;
  std::string phase = "both";
  std::uint64_t cache_kib = 128;
  std::uint64_t line = 64;
  std::uint64_t ways = 4;
};

int cmd_aia(const Globals& g, const AiaArgs& args) {
  const CsrMatrix a = load_matrix_market(args.input);
  aia::CacheConfig cache{args.cache_kib * 1024, args.line, args.ways};
  std::vector<aia::Phase> phases;
  if (args.phase == "allocation" || args.phase == "both") phases.push_back(aia::Phase::Allocation);
  if (args.phase == "accumulation" || args.phase == "both") phases.push_back(aia::Phase::Accumulation);

  SpgemmConfig config;
  config.worker_count = g.workers;
  const auto plan = group_rows(count_intermediate_products(a, a), config);
  const auto report = aia::compare_modes(a, a, plan, cache, phases);

  BenchReport r;
  r.command = "aia";
  r.input = describe(stem(args.input), a);
  r.run_id = bench::make_run_id(r.command, r.input.name, g.seed);
  r.workers = config.resolved_workers();
  r.cache = cache;
  r.seed = g.seed;
  int code = kExitOk;
  bool law = true;
  std::printf("%-13s %-9s %14s %14s %9s %14s\n", "phase", "mode", "round_trips", "accesses",
              "hit_ratio", "bytes_moved");
  for (const auto& p : report.phases) {
    const std::string phase(aia::to_string(p.phase));
    for (const auto* m : {&p.baseline, &p.aia}) {
      const std::string mode = m == &p.baseline ? "baseline" : "aia";
      r.results.push_back({"", mode, phase, std::nullopt, *m, std::nullopt});
      std::printf("%-13s %-9s %14lld %14lld %9.4f %14lld\n", phase.c_str(), mode.c_str(),
                  static_cast<long long>(m->round_trips), static_cast<long long>(m->accesses),
                  m->hit_ratio, static_cast<long long>(m->bytes_moved));
    }
    if (const auto why = aia::check_round_trip_law(p); !why.empty()) {
      std::cerr << phase << ": " << why << '\n';
      law = false;
    }
  }
  r.verify = law ? "pass" : "fail";
  r.extra["round_trip_law"] = law;
  if (!law) code = kExitVerify;
  emit(g, r);
  return code;
}

// ---- mcl ------------------------------------------------------------------

struct MclArgs {
  std::string input;
  std::string out;
  MclParams params;
};

int cmd_mcl(const Globals& g, MclArgs args) {
  const CsrMatrix graph = load_matrix_market(args.input);
  args.params.engine.worker_count = g.workers;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = mcl(graph, args.params);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!args.out.empty()) {
    std::ostringstream text;
    write_clusters(text, res.clusters);
    write_text(args.out, text.str());
  }
  std::cout << stem(args.input) << ": clusters=" << res.clusters.n_clusters
            << " iterations=" << res.iterations << " converged=" << (res.converged ? "yes" : "no")
            << '\n';

  BenchReport r;
  r.command = "mcl";
  r.input = describe(stem(args.input), graph);
  r.run_id = bench::make_run_id(r.command, r.input.name, g.seed);
  r.workers = args.params.engine.resolved_workers();
  r.seed = g.seed;
  r.results.push_back({"hash-engine", "", "", std::nullopt, std::nullopt, secs});
  r.extra = {{"n_clusters", res.clusters.n_clusters},
             {"iterations", res.iterations},
             {"converged", res.converged},
             {"worst_column_error", res.worst_column_error}};
  emit(g, r);
  return kExitOk;
}

// ---- contract -------------------------------------------------------------

struct ContractArgs {
  std::string input;
  std::string labels;
  std::string out;
};

int cmd_contract(const Globals& g, const ContractArgs& args) {
  const CsrMatrix graph = load_matrix_market(args.input);
  const auto labels = parse_labels(read_file(args.labels));
  SpgemmConfig config;
  config.worker_count = g.workers;
  const auto t0 = std::chrono::steady_clock::now();
  const CsrMatrix c = graph_contract(graph, labels, config);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!args.out.empty()) {
    save_matrix_market(args.out, c);
  } else {
    write_matrix_market(std::cout, c);
  }
  const bool conserved = std::abs(sum_values(c) - sum_values(graph)) <=
                         1e-12 * std::max(1.0, std::abs(sum_values(graph)));

  BenchReport r;
  r.command = "contract";
  r.input = describe(stem(args.input), graph);
  r.run_id = bench::make_run_id(r.command, r.input.name, g.seed);
  r.workers = config.resolved_workers();
  r.seed = g.seed;
  r.results.push_back({"hash-engine", "", "", std::nullopt, std::nullopt, secs});
  r.verify = conserved ? "pass" : "fail";
  r.extra = {{"contracted_rows", c.n_rows()}, {"contracted_nnz", c.nnz()},
             {"mass_conserved", conserved}};
  emit(g, r);
  return conserved ? kExitOk : kExitVerify;
}

// ---- gnncheck -------------------------------------------------------------

struct GnnArgs {
  int n = 5;
  int f = 4;
  int f_out = 0;
  std::int64_t k = 2;
  double step = 1e-6;
  bool global = false;
};

int cmd_gnncheck(const Globals& g, const GnnArgs& args) {
  SpgemmConfig config;
  config.worker_count = g.workers;
  const auto inst = gnn::random_instance(g.seed, args.n, args.f, args.f_out);
  const auto res =
      gnn::gradient_check(inst.a, inst.x, inst.w, inst.target, args.k, args.step, args.global, config);
  constexpr double kTolerance = 1e-5;
  const bool ok = res.max_rel_error < kTolerance && res.unmasked_nonzero == 0;
  std::cout << "gnncheck: n=" << args.n << " f=" << args.f << " k=" << args.k
            << " max_rel_error=" << res.max_rel_error << " masked=" << res.masked_checked
            << " unmasked_nonzero=" << res.unmasked_nonzero << (ok ? " pass" : " FAIL") << '\n';

  BenchReport r;
  r.command = "gnncheck";
  r.input = {"random", args.n, args.n, inst.a.nnz()};
  r.run_id = bench::make_run_id(r.command, "n" + std::to_string(args.n) + "f" + std::to_string(args.f) +
                                               "k" + std::to_string(args.k), g.seed);
  r.workers = config.resolved_workers();
  r.seed = g.seed;
  r.verify = ok ? "pass" : "fail";
  r.extra = {{"max_rel_error", res.max_rel_error},
             {"masked_checked", res.masked_checked},
             {"unmasked_nonzero", res.unmasked_nonzero},
             {"tolerance", kTolerance}};
  emit(g, r);
  return ok ? kExitOk : kExitVerify;
}

// ---- corpus ---------------------------------------------------------------

struct CorpusArgs {
  std::vector<std::string> names;
  std::string dir;
};

std::vector<bench::CorpusEntry> select_entries(const std::vector<std::string>& names) {
  std::vector<bench::CorpusEntry> out;
  if (names.size() == 1 && bench::lower(names[0]) == "all") {
    for (const auto& e : bench::corpus_registry()) {
      if (!e.bundled()) out.push_back(e);
    }
    return out;
  }
  for (const auto& n : names) {
    auto e = bench::find_entry(n);
    if (!e) raise(ErrorKind::BadConfig, "unknown corpus matrix '" + n + "'");
    out.push_back(*e);
  }
  return out;
}

int cmd_corpus_fetch(const CorpusArgs& args) {
  const fs::path dir = args.dir.empty() ? bench::corpus_dir() : fs::path(args.dir);
  for (const auto& e : select_entries(args.names)) {
    if (e.bundled()) {
      std::cout << e.name << ": bundled fixture, nothing to fetch\n";
      continue;
    }
    if (auto have = bench::locate(e, {dir})) {
      std::cout << e.name << ": present at " << have->string() << '\n';
      continue;
    }
    std::cout << e.name << ": fetching " << e.url() << '\n';
    std::cout << e.name << ": " << bench::fetch(e, dir).string() << '\n';
  }
  return kExitOk;
}

int cmd_corpus_verify(const Globals& g, const CorpusArgs& args) {
  std::vector<fs::path> dirs;
  if (!args.dir.empty()) dirs.push_back(args.dir);
  dirs.push_back(bench::corpus_dir());
  if (std::string(SPK_FIXTURE_DIR).size() > 0) dirs.push_back(SPK_FIXTURE_DIR);
  const bool all = args.names.size() == 1 && bench::lower(args.names[0]) == "all";

  SpgemmConfig config;
  config.worker_count = g.workers;
  int code = kExitOk;
  bench::json out = bench::json::array();
  for (const auto& e : select_entries(args.names)) {
    const auto path = bench::locate(e, dirs);
    if (!path) {
      if (all) {
        std::cout << e.name << ": not present, skipped\n";
        continue;
      }
      raise(ErrorKind::IoError, e.name + ": " + e.file + ".mtx not found; run 'corpus fetch " +
                                    e.name + "' or set SPGEMM_CORPUS_DIR");
    }
    const auto outcome = bench::verify_matrix(e, load_matrix_market(path->string()), config);
    bench::json j = {{"name", e.name}, {"path", path->string()}, {"passed", outcome.passed()}};
    for (const auto& c : outcome.checks) {
      const char* mark = c.ok() ? "ok" : (c.informational ? "differs (informational)" : "MISMATCH");
      std::cout << e.name << ": " << c.what << " expected=" << c.expected << " actual=" << c.actual
                << ' ' << mark << '\n';
      j["checks"].push_back({{"what", c.what},
                             {"expected", c.expected},
                             {"actual", c.actual},
                             {"informational", c.informational}});
    }
    if (!outcome.passed()) code = kExitVerify;
    out.push_back(std::move(j));
  }
  if (!g.json_path.empty()) write_text(g.json_path, out.dump(2) + "\n");
  if (code != kExitOk) std::cerr << "corpus verify: mismatch against expected statistics\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse matrix kit: hash SpGEMM, access simulator, graph and GNN workloads"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--workers", g.workers, "Worker threads (0 = hardware concurrency)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--json", g.json_path, "Write the JSON report here ('-' for stdout)");
  app.add_option("--csv", g.csv_path, "Write plot-ready CSV here ('-' for stdout)");
  app.add_flag("--verify", g.verify, "Check the engine against the reference product");

  SpgemmArgs sp;
  auto* c_sp = app.add_subcommand("spgemm", "Multiply A*A, or A*B with two inputs");
  c_sp->add_option("inputs", sp.inputs, "Matrix Market file(s)")->required()->expected(1, 2);
  c_sp->add_option("--out", sp.out, "Write the product as Matrix Market");
  c_sp->add_flag("--no-warmup", sp.no_warmup, "Time the first run instead of a warm run");
  c_sp->add_flag("--shared", sp.shared, "All workers share one table per row");
  c_sp->add_flag("--bitonic", sp.bitonic, "Sort rows with the bitonic network");

  AiaArgs ai;
  auto* c_ai = app.add_subcommand("aia", "Compare baseline and ranged-indirect access traces");
  c_ai->add_option("input", ai.input, "Matrix Market file")->required();
  c_ai->add_option("--phase", ai.phase, "allocation, accumulation or both")
      ->check(CLI::IsMember({"allocation", "accumulation", "both"}));
  c_ai->add_option("--cache-kib", ai.cache_kib, "Cache capacity in KiB");
  c_ai->add_option("--line", ai.line, "Cache line size in bytes");
  c_ai->add_option("--ways", ai.ways, "Cache associativity");

  MclArgs mc;
  auto* c_mc = app.add_subcommand("mcl", "Markov clustering");
  c_mc->add_option("input", mc.input, "Graph as Matrix Market")->required();
  c_mc->add_option("--out", mc.out, "Write '<node> <cluster>' lines here");
  c_mc->add_option("--e", mc.params.e, "Expansion exponent");
  c_mc->add_option("--r", mc.params.r, "Inflation exponent");
  c_mc->add_option("--theta", mc.params.theta, "Pruning threshold");
  c_mc->add_option("--k", mc.params.k, "Entries kept per column");
  c_mc->add_option("--max-iter", mc.params.max_iter, "Iteration limit");
  c_mc->add_option("--eps", mc.params.eps, "Convergence tolerance");

  ContractArgs ct;
  auto* c_ct = app.add_subcommand("contract", "Graph contraction C = S*G*S^T");
  c_ct->add_option("input", ct.input, "Graph as Matrix Market")->required();
  c_ct->add_option("labels", ct.labels, "Labels file, one 1-based label per node")->required();
  c_ct->add_option("--out", ct.out, "Write C as Matrix Market (default: stdout)");

  GnnArgs gn;
  auto* c_gn = app.add_subcommand("gnncheck", "Finite-difference check of pruned propagation");
  c_gn->add_option("--n", gn.n, "Nodes")->check(CLI::PositiveNumber);
  c_gn->add_option("--f", gn.f, "Input feature width")->check(CLI::PositiveNumber);
  c_gn->add_option("--f-out", gn.f_out, "Output feature width (default: --f)");
  c_gn->add_option("--k", gn.k, "Top-k per row")->check(CLI::PositiveNumber);
  c_gn->add_option("--step", gn.step, "Finite-difference step");
  c_gn->add_flag("--global", gn.global, "Global top-k instead of per row");

  CorpusArgs co;
  auto* c_co = app.add_subcommand("corpus", "Manage and verify the benchmark matrices");
  c_co->require_subcommand(1);
  auto* c_fetch = c_co->add_subcommand("fetch", "Download matrices");
  c_fetch->add_option("names", co.names, "Matrix names or 'all'")->required();
  c_fetch->add_option("--dir", co.dir, "Target directory (default: $SPGEMM_CORPUS_DIR or ./corpus)");
  auto* c_verify = c_co->add_subcommand("verify", "Check rows, nnz, products and nnz(A^2)");
  c_verify->add_option("names", co.names, "Matrix names or 'all'")->required();
  c_verify->add_option("--dir", co.dir, "Extra directory to search first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*c_sp) return cmd_spgemm(g, sp);
    if (*c_ai) return cmd_aia(g, ai);
    if (*c_mc) return cmd_mcl(g, mc);
    if (*c_ct) return cmd_contract(g, ct);
    if (*c_gn) return cmd_gnncheck(g, gn);
    if (*c_fetch) return cmd_corpus_fetch(co);
    if (*c_verify) return cmd_corpus_verify(g, co);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::MismatchError ? kExitVerify : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
