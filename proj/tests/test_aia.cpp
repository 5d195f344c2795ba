#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "spk/aia/access_plan.hpp"
#include "spk/aia/cache.hpp"
#include "spk/aia/compare.hpp"
#include "spk/aia/request.hpp"
#include "spk/spgemm/grouping.hpp"
#include "test_support.hpp"

namespace {

using namespace spk;
using namespace spk::aia;
using spk::testing::a3;

RowGroupPlan plan_for(const CsrMatrix& a, const CsrMatrix& b) {
  return group_rows(count_intermediate_products(a, b), SpgemmConfig{});
}

// Two-array layout for hand-built requests: "a" (ids 0) and "b" (id 1).
struct Toy {
  MemoryLayout layout;
  std::vector<std::int64_t> b;
  Resolver resolver() const {
    return [this](int array, std::int64_t i) -> std::optional<std::int64_t> {
      if (array != 1 || i < 0 || i >= static_cast<std::int64_t>(b.size())) return std::nullopt;
      return b[static_cast<std::size_t>(i)];
    };
  }
};

Toy toy(std::vector<std::int64_t> b, std::int64_t a_len = 64) {
  Toy t;
  t.layout.add_array("a", 8, a_len);
  t.layout.add_array("b", 4, static_cast<std::int64_t>(b.size()));
  t.b = std::move(b);
  return t;
}

std::vector<std::pair<int, std::int64_t>> data_multiset(const AccessTrace& t) {
  std::vector<std::pair<int, std::int64_t>> out;
  for (const auto& e : t.events) {
    if (e.kind == FetchKind::Data) out.emplace_back(e.array, e.index);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(AccessPlan, A3AllocationLevels) {
  const auto a = a3();
  const auto plan = plan_for(a, a);
  const auto reqs = build_spgemm_access_plan(a, a, plan, Phase::Allocation);
  ASSERT_FALSE(reqs.empty());
  EXPECT_EQ(reqs[0].dst, dst::kRowRanges);
  EXPECT_EQ(reqs[0].n, 3);
  EXPECT_EQ(reqs[0].r, 2);
  EXPECT_EQ(reqs[0].a.id, arrays::kRptA);
  EXPECT_EQ(reqs[0].b.id, arrays::kMap);

  // Level-2 lookups walk col_A = [0,2,1,0,2].
  const auto layout = spgemm_layout(a, a);
  const auto resolve = spgemm_resolver(a, a, plan);
  std::vector<std::int64_t> looked_up;
  std::int64_t level2 = 0;
  for (const auto& r : reqs) {
    if (r.dst != dst::kBRowRanges) continue;
    EXPECT_EQ(r.r, 2);
    level2 += r.n;
    for (std::int64_t t = 0; t < r.n; ++t) looked_up.push_back(*resolve(r.b.id, r.b_offset + t));
  }
  EXPECT_EQ(level2, 5);
  EXPECT_EQ(looked_up, (std::vector<std::int64_t>{0, 2, 1, 0, 2}));
  for (const auto& r : reqs) EXPECT_NE(r.dst, dst::kValB);
}

TEST(AccessPlan, AccumulationAddsValueRanges) {
  const auto a = a3();
  const auto plan = plan_for(a, a);
  const auto alloc = build_spgemm_access_plan(a, a, plan, Phase::Allocation);
  const auto accum = build_spgemm_access_plan(a, a, plan, Phase::Accumulation);
  auto count = [](const auto& v, int d) {
    return std::count_if(v.begin(), v.end(), [d](const AiaRequest& r) { return r.dst == d; });
  };
  EXPECT_EQ(count(accum, dst::kValB), count(alloc, dst::kColB));
  EXPECT_EQ(count(accum, dst::kValA), 3);
  EXPECT_EQ(count(alloc, dst::kValA), 0);
}

TEST(AccessPlan, SingleRowSingleNonzero) {
  const auto a = csr_from_triplets<double>(1, 1, {{0, 0, 2.0}});
  const auto reqs = build_spgemm_access_plan(a, a, plan_for(a, a), Phase::Allocation);
  ASSERT_EQ(reqs.size(), 3u);
  EXPECT_EQ(reqs[0].n, 1);
  EXPECT_EQ(reqs[1].dst, dst::kBRowRanges);
  EXPECT_EQ(reqs[1].n, 1);
  EXPECT_EQ(reqs[2].dst, dst::kColB);
}

TEST(AccessPlan, EmptyMatrixGivesEmptyPlan) {
  const auto a = CsrMatrix::empty(4, 4);
  EXPECT_TRUE(build_spgemm_access_plan(a, a, plan_for(a, a), Phase::Accumulation).empty());
  const auto z = CsrMatrix::empty(0, 0);
  EXPECT_TRUE(build_spgemm_access_plan(z, z, plan_for(z, z), Phase::Allocation).empty());
}

TEST(AccessPlan, PlanMismatch) {
  const auto a = a3();
  auto plan = plan_for(a, a);
  plan.ip_per_row[1] = 7;
  try {
    build_spgemm_access_plan(a, a, plan, Phase::Allocation);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PlanMismatch);
  }
  const auto other = plan_for(CsrMatrix::identity(5), CsrMatrix::identity(5));
  try {
    build_spgemm_access_plan(a, a, other, Phase::Allocation);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PlanMismatch);
  }
}

TEST(Trace, RoundTripsForFourIndices) {
  const auto t = toy({0, 10, 20, 30});
  const AiaRequest req{0, 4, 2, {0, 8}, {1, 4}, 0};
  const auto base = expand_trace(req, t.resolver(), Mode::Baseline, t.layout);
  const auto fast = expand_trace(req, t.resolver(), Mode::Aia, t.layout);
  EXPECT_EQ(base.round_trips, 8);
  EXPECT_EQ(fast.round_trips, 1);
  EXPECT_EQ(base.events.size(), 12u);
  EXPECT_EQ(fast.events.size(), 12u);
  EXPECT_EQ(data_multiset(base), data_multiset(fast));

  // Baseline interleaves index then range.
  EXPECT_EQ(base.events[0].kind, FetchKind::Index);
  EXPECT_EQ(base.events[1].index, 0);
  EXPECT_EQ(base.events[2].index, 1);
  EXPECT_EQ(base.events[3].kind, FetchKind::Index);
  // Aia: internal index fetches first, then a contiguous stream.
  for (int k = 0; k < 4; ++k) EXPECT_TRUE(fast.events[k].internal);
  for (int k = 4; k < 12; ++k) {
    EXPECT_FALSE(fast.events[k].internal);
    EXPECT_EQ(fast.events[k].address, t.layout.stream_base() + 8u * static_cast<unsigned>(k - 4));
  }
}

TEST(Trace, EmptyRequest) {
  const auto t = toy({});
  const AiaRequest req{0, 0, 3, {0, 8}, {1, 4}, 0};
  for (Mode m : {Mode::Baseline, Mode::Aia}) {
    const auto tr = expand_trace(req, t.resolver(), m, t.layout);
    EXPECT_TRUE(tr.events.empty());
    EXPECT_EQ(tr.round_trips, 0);
  }
}

TEST(Trace, DuplicateIndex) {
  const auto t = toy({7, 7});
  const AiaRequest req{0, 2, 1, {0, 8}, {1, 4}, 0};
  const auto base = expand_trace(req, t.resolver(), Mode::Baseline, t.layout);
  const auto fast = expand_trace(req, t.resolver(), Mode::Aia, t.layout);
  const std::vector<std::pair<int, std::int64_t>> want{{0, 7}, {0, 7}};
  EXPECT_EQ(data_multiset(base), want);
  EXPECT_EQ(data_multiset(fast), want);
}

TEST(Trace, AiaStreamIsAscending) {
  const auto t = toy({40, 3, 22, 3});
  const AiaRequest req{0, 4, 3, {0, 8}, {1, 4}, 0};
  const auto fast = expand_trace(req, t.resolver(), Mode::Aia, t.layout);
  std::vector<std::int64_t> order;
  for (const auto& e : fast.events) {
    if (e.kind == FetchKind::Data) order.push_back(e.index);
  }
  EXPECT_TRUE(std::is_sorted(order.begin(), order.end()));
}

TEST(Trace, Errors) {
  const auto t = toy({1, 2});
  try {
    expand_trace(AiaRequest{0, 3, 1, {0, 8}, {1, 4}, 0}, t.resolver(), Mode::Aia, t.layout);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResolverFailure);
  }
  try {
    expand_trace(AiaRequest{0, 1, 0, {0, 8}, {1, 4}, 0}, t.resolver(), Mode::Aia, t.layout);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadConfig);
  }
  try {
    expand_trace(AiaRequest{0, 1, 1, {0, 2}, {1, 4}, 0}, t.resolver(), Mode::Aia, t.layout);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadConfig);
  }
}

TEST(Trace, DumpFormat) {
  const auto t = toy({0});
  const auto tr = expand_trace(AiaRequest{0, 1, 1, {0, 8}, {1, 4}, 0}, t.resolver(),
                               Mode::Baseline, t.layout);
  std::ostringstream out;
  write_trace(out, tr, t.layout);
  EXPECT_EQ(out.str(), "baseline b 0 200 index-fetch\nbaseline a 0 0 data-fetch\n");
}

TEST(Layout, AlignedAndDisjoint) {
  MemoryLayout l;
  l.add_array("x", 4, 3);
  l.add_array("y", 8, 17);
  l.add_array("z", 4, 0);
  l.add_array("w", 4, 1);
  EXPECT_EQ(l.address(0, 0), 0u);
  EXPECT_EQ(l.address(1, 0), 64u);
  EXPECT_EQ(l.address(2, 0), 64u + 192u);
  EXPECT_EQ(l.address(3, 0), 64u + 192u);
  EXPECT_EQ(l.stream_base(), 64u + 192u + 64u);
}

AccessTrace synthetic(std::vector<std::uint64_t> addrs) {
  AccessTrace t;
  for (auto a : addrs) t.events.push_back({0, 0, a, FetchKind::Data, false});
  return t;
}

TEST(Cache, SameAddressRepeated) {
  for (int n : {1, 2, 10, 1000}) {
    const auto s = simulate_cache(synthetic(std::vector<std::uint64_t>(static_cast<std::size_t>(n), 4096)),
                                  CacheConfig{});
    EXPECT_EQ(s.accesses, n);
    EXPECT_DOUBLE_EQ(s.hit_ratio(), static_cast<double>(n - 1) / n);
  }
}

TEST(Cache, SequentialScanHitsSevenOfEight) {
  std::vector<std::uint64_t> addrs;
  for (std::uint64_t i = 0; i < 8000; ++i) addrs.push_back(i * 8);
  const auto s = simulate_cache(synthetic(addrs), CacheConfig{});
  EXPECT_DOUBLE_EQ(s.hit_ratio(), 7.0 / 8.0);
  EXPECT_EQ(s.hits + s.misses, s.accesses);
}

TEST(Cache, LruEvictsOldestInSet) {
  // 2 sets x 2 ways, 64-byte lines: lines 0, 2, 4 share set 0.
  const CacheConfig cfg{256, 64, 2};
  CacheSim sim(cfg);
  EXPECT_FALSE(sim.access(0));
  EXPECT_FALSE(sim.access(128));
  EXPECT_TRUE(sim.access(0));     // 128 now oldest
  EXPECT_FALSE(sim.access(256));  // evicts 128
  EXPECT_TRUE(sim.access(0));
  EXPECT_FALSE(sim.access(128));
  EXPECT_FALSE(sim.access(256));  // 128 evicted 256
  EXPECT_FALSE(sim.access(64));   // set 1 is cold
  EXPECT_TRUE(sim.access(64));
}

TEST(Cache, InternalEventsSkipped) {
  AccessTrace t = synthetic({0, 64});
  t.events.push_back({0, 0, 128, FetchKind::Index, true});
  EXPECT_EQ(simulate_cache(t, CacheConfig{}).accesses, 2);
}

TEST(Cache, BadConfig) {
  for (CacheConfig c : {CacheConfig{1000, 64, 4}, CacheConfig{128, 64, 4}, CacheConfig{4096, 48, 4},
                        CacheConfig{4096, 64, 3}, CacheConfig{0, 64, 1}}) {
    try {
      CacheSim sim(c);
      FAIL() << c.capacity_bytes << ' ' << c.line_bytes << ' ' << c.associativity;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::BadConfig);
    }
  }
}

TEST(Cache, FullyAssociativeMonotoneInCapacity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint64_t> addrs;
    std::uniform_int_distribution<std::uint64_t> pick(0, 64 * 200);
    for (int k = 0; k < 5000; ++k) addrs.push_back(pick(rng));
    const auto trace = synthetic(addrs);
    double prev = -1;
    for (std::uint64_t cap = 512; cap <= 64 * 1024; cap *= 2) {
      const double h = simulate_cache(trace, CacheConfig::fully_associative(cap)).hit_ratio();
      EXPECT_GE(h, prev);
      prev = h;
    }
  }
}

// Plain re-derivation of the round-trip law by expanding every request.
TEST(Compare, RoundTripLawOnRandomPlans) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const index_t n = static_cast<index_t>(1 + rng() % 60);
    const auto a = spk::testing::random_csr(rng, n, n, 0.08);
    const auto b = spk::testing::random_csr(rng, n, n, 0.08);
    const auto plan = plan_for(a, b);
    const auto layout = spgemm_layout(a, b);
    const auto resolve = spgemm_resolver(a, b, plan);
    for (Phase p : {Phase::Allocation, Phase::Accumulation}) {
      const auto reqs = build_spgemm_access_plan(a, b, plan, p);
      std::int64_t sum_n = 0, base_rt = 0, aia_rt = 0;
      std::vector<std::pair<int, std::int64_t>> base_data, aia_data;
      StreamCursor c1, c2;
      for (const auto& r : reqs) {
        sum_n += r.n;
        const auto bt = expand_trace(r, resolve, Mode::Baseline, layout, c1);
        const auto at = expand_trace(r, resolve, Mode::Aia, layout, c2);
        base_rt += bt.round_trips;
        aia_rt += at.round_trips;
        EXPECT_EQ(data_multiset(bt), data_multiset(at));
        auto d1 = data_multiset(bt), d2 = data_multiset(at);
        base_data.insert(base_data.end(), d1.begin(), d1.end());
        aia_data.insert(aia_data.end(), d2.begin(), d2.end());
      }
      EXPECT_EQ(base_rt, 2 * sum_n);
      EXPECT_EQ(aia_rt, static_cast<std::int64_t>(reqs.size()));

      const auto report = compare_modes(a, b, plan, CacheConfig{}, {p});
      const auto& pr = report.phases.at(0);
      EXPECT_EQ(check_round_trip_law(pr), "");
      EXPECT_EQ(pr.baseline.round_trips, base_rt);
      EXPECT_EQ(pr.aia.round_trips, aia_rt);
      EXPECT_EQ(pr.baseline.data_fetches, static_cast<std::int64_t>(base_data.size()));
    }
  }
}

// The allocation-phase data reads are exactly what the kernel touches:
// rpt_A twice per active row, rpt_B twice per A nonzero, col_B per product.
TEST(Compare, AllocationReadsMatchKernel) {
  std::mt19937_64 rng(8);
  const auto a = spk::testing::random_csr(rng, 40, 30, 0.1);
  const auto b = spk::testing::random_csr(rng, 30, 50, 0.1);
  const auto plan = plan_for(a, b);
  std::map<std::pair<int, std::int64_t>, int> expect;
  for (index_t i = 0; i < a.n_rows(); ++i) {
    if (plan.ip_per_row[static_cast<std::size_t>(i)] == 0) continue;
    ++expect[{arrays::kRptA, i}];
    ++expect[{arrays::kRptA, i + 1}];
    for (index_t k : a.row_cols(i)) {
      if (b.row_length(k) == 0) {
        ++expect[{arrays::kRptB, k}];
        ++expect[{arrays::kRptB, k + 1}];
        continue;
      }
      ++expect[{arrays::kRptB, k}];
      ++expect[{arrays::kRptB, k + 1}];
      for (offset_t q = b.row_begin(k); q < b.row_end(k); ++q) ++expect[{arrays::kColB, q}];
    }
  }
  const auto layout = spgemm_layout(a, b);
  const auto resolve = spgemm_resolver(a, b, plan);
  std::map<std::pair<int, std::int64_t>, int> got;
  for (const auto& r : build_spgemm_access_plan(a, b, plan, Phase::Allocation)) {
    for (const auto& e : expand_trace(r, resolve, Mode::Baseline, layout).events) {
      if (e.kind == FetchKind::Data) ++got[{e.array, e.index}];
    }
  }
  EXPECT_EQ(got, expect);
}

TEST(Compare, A3AiaFewerRoundTrips) {
  const auto a = a3();
  const auto report = compare_modes(a, a, plan_for(a, a), CacheConfig{});
  ASSERT_EQ(report.phases.size(), 2u);
  for (const auto& p : report.phases) {
    EXPECT_LT(p.aia.round_trips, p.baseline.round_trips);
    EXPECT_EQ(check_round_trip_law(p), "");
    EXPECT_EQ(p.baseline.bytes_moved, p.baseline.misses * 64);
    EXPECT_GT(p.aia.internal_index_bytes, 0);
    EXPECT_EQ(p.baseline.internal_index_bytes, 0);
  }
}

TEST(Compare, DiagonalHitRatiosClose) {
  std::vector<Triplet> d;
  for (index_t i = 0; i < 20000; ++i) d.push_back({i, i, 1.0 + i % 7});
  const auto a = csr_from_triplets(20000, 20000, std::move(d));
  const auto report = compare_modes(a, a, plan_for(a, a), CacheConfig{});
  for (const auto& p : report.phases) {
    EXPECT_NEAR(p.baseline.hit_ratio, p.aia.hit_ratio, 0.05) << to_string(p.phase);
  }
}

TEST(Compare, Deterministic) {
  std::mt19937_64 rng(3);
  const auto a = spk::testing::random_csr(rng, 80, 80, 0.05);
  const auto plan = plan_for(a, a);
  const auto r1 = compare_modes(a, a, plan, CacheConfig{});
  const auto r2 = compare_modes(a, a, plan, CacheConfig{});
  for (std::size_t k = 0; k < r1.phases.size(); ++k) {
    EXPECT_EQ(r1.phases[k].baseline.hits, r2.phases[k].baseline.hits);
    EXPECT_EQ(r1.phases[k].aia.hits, r2.phases[k].aia.hits);
    EXPECT_EQ(r1.phases[k].aia.data_fingerprint, r2.phases[k].aia.data_fingerprint);
  }
}

// Large, irregular operand: scattered B-row reads defeat the baseline cache
// while the aia stream stays sequential.
TEST(Compare, AiaNotWorseOnIrregularMatrix) {
  std::mt19937_64 rng(21);
  const index_t n = 60000;
  std::vector<Triplet> t;
  std::uniform_int_distribution<index_t> col(0, n - 1);
  for (index_t i = 0; i < n; ++i) {
    const int len = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < len; ++k) t.push_back({i, col(rng), 1.0});
  }
  const auto a = csr_from_triplets(n, n, std::move(t));
  const auto report = compare_modes(a, a, plan_for(a, a), CacheConfig{});
  for (const auto& p : report.phases) {
    EXPECT_GT(p.aia.hit_ratio, p.baseline.hit_ratio) << to_string(p.phase);
  }
}

}  // namespace
