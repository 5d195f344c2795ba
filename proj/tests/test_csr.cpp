#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "spk/csr.hpp"
#include "spk/oracle.hpp"
#include "test_support.hpp"

namespace spk {
namespace {

using testing::a3;

TEST(CsrFromTriplets, ThreeByThreeExample) {
  auto m = a3();
  EXPECT_EQ(std::vector<offset_t>(m.row_ptr().begin(), m.row_ptr().end()),
            (std::vector<offset_t>{0, 2, 3, 5}));
  EXPECT_EQ(std::vector<index_t>(m.col_idx().begin(), m.col_idx().end()),
            (std::vector<index_t>{0, 2, 1, 0, 2}));
  EXPECT_EQ(std::vector<double>(m.values().begin(), m.values().end()),
            (std::vector<double>{1, 2, 3, 4, 5}));
  EXPECT_TRUE(validate(m).empty());
  // Re-expansion gives back the input entries.
  EXPECT_EQ(to_triplets(m),
            (std::vector<Triplet>{{0, 0, 1}, {0, 2, 2}, {1, 1, 3}, {2, 0, 4}, {2, 2, 5}}));
}

TEST(CsrFromTriplets, EmptyMatrix) {
  auto m = csr_from_triplets<double>(2, 2, {});
  EXPECT_EQ(m.nnz(), 0);
  EXPECT_EQ(std::vector<offset_t>(m.row_ptr().begin(), m.row_ptr().end()),
            (std::vector<offset_t>{0, 0, 0}));
}

TEST(CsrFromTriplets, DuplicatesSummedOrRejected) {
  auto m = csr_from_triplets<double>(1, 1, {{0, 0, 1}, {0, 0, 2}});
  ASSERT_EQ(m.nnz(), 1);
  EXPECT_EQ(m.values()[0], 3.0);
  try {
    csr_from_triplets<double>(1, 1, {{0, 0, 1}, {0, 0, 2}}, DupPolicy::Error);
    FAIL() << "expected DuplicateEntry";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateEntry);
  }
}

TEST(CsrFromTriplets, IndexOutOfRange) {
  try {
    csr_from_triplets<double>(2, 2, {{0, 2, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST(CsrFromTriplets, InputOrderDoesNotMatter) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto base = to_triplets(testing::random_csr(rng, 30, 20, 0.2));
    auto shuffled = base;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto x = csr_from_triplets(30, 20, base);
    auto y = csr_from_triplets(30, 20, shuffled);
    EXPECT_EQ(x, y);
    // Round trip on canonical input.
    EXPECT_EQ(to_triplets(x), base);
  }
}

TEST(Transpose, ThreeByThreeExample) {
  auto t = transpose(a3());
  EXPECT_EQ(std::vector<offset_t>(t.row_ptr().begin(), t.row_ptr().end()),
            (std::vector<offset_t>{0, 2, 3, 5}));
  EXPECT_EQ(std::vector<index_t>(t.col_idx().begin(), t.col_idx().end()),
            (std::vector<index_t>{0, 2, 1, 0, 2}));
  EXPECT_EQ(std::vector<double>(t.values().begin(), t.values().end()),
            (std::vector<double>{1, 4, 3, 2, 5}));
}

TEST(Transpose, IdentityAndEmpty) {
  EXPECT_EQ(transpose(CsrMatrix::identity(4)), CsrMatrix::identity(4));
  auto t = transpose(CsrMatrix::empty(2, 3));
  EXPECT_EQ(t.n_rows(), 3);
  EXPECT_EQ(t.n_cols(), 2);
  EXPECT_EQ(t.nnz(), 0);
  EXPECT_TRUE(validate(t).empty());
}

TEST(Transpose, InvolutionOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = testing::random_csr(rng, 1 + trial, 40 - trial / 2, 0.1);
    auto t = transpose(m);
    EXPECT_TRUE(validate(t).empty());
    EXPECT_EQ(transpose(t), m);
  }
}

TEST(Validate, ReportsBrokenInvariants) {
  auto bad_ptr = CsrMatrix::unchecked(2, 2, {0, 2, 1}, {0}, {1.0});
  auto v = validate(bad_ptr);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().rule, "non-monotone row_ptr");
  EXPECT_EQ(v.front().row, 2);

  auto bad_col = CsrMatrix::unchecked(1, 3, {0, 1}, {3}, {1.0});
  v = validate(bad_col);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.front().rule, "index out of range");
  EXPECT_EQ(v.front().row, 0);

  auto unsorted = CsrMatrix::unchecked(1, 3, {0, 2}, {2, 1}, {1.0, 1.0});
  v = validate(unsorted);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.front().rule, "unsorted row");

  auto dup = CsrMatrix::unchecked(1, 3, {0, 2}, {1, 1}, {1.0, 1.0});
  v = validate(dup);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.front().rule, "duplicate entry");

  EXPECT_THROW(CsrMatrix::from_parts(1, 3, {0, 2}, {1, 1}, {1.0, 1.0}), Error);
}

TEST(OracleSpgemm, ThreeByThreeSquare) {
  auto c = oracle_spgemm(a3(), a3());
  EXPECT_EQ(std::vector<offset_t>(c.row_ptr().begin(), c.row_ptr().end()),
            (std::vector<offset_t>{0, 2, 3, 5}));
  EXPECT_EQ(std::vector<index_t>(c.col_idx().begin(), c.col_idx().end()),
            (std::vector<index_t>{0, 2, 1, 0, 2}));
  EXPECT_EQ(std::vector<double>(c.values().begin(), c.values().end()),
            (std::vector<double>{9, 12, 9, 24, 33}));
}

TEST(OracleSpgemm, IdentityAndEmptyColumns) {
  std::mt19937_64 rng(5);
  auto m = testing::random_csr(rng, 17, 23, 0.2);
  EXPECT_EQ(oracle_spgemm(CsrMatrix::identity(17), m), m);
  EXPECT_EQ(oracle_spgemm(m, CsrMatrix::identity(23)), m);
  auto z = oracle_spgemm(m, CsrMatrix::empty(23, 0));
  EXPECT_EQ(z.n_cols(), 0);
  EXPECT_EQ(z.nnz(), 0);
  EXPECT_THROW(oracle_spgemm(m, m), Error);
}

TEST(OracleSpgemm, CancellationKeptAsStoredZero) {
  // Row [1, 1] times column [1, -1]^T cancels exactly.
  auto a = csr_from_triplets<double>(1, 2, {{0, 0, 1}, {0, 1, 1}});
  auto b = csr_from_triplets<double>(2, 1, {{0, 0, 1}, {1, 0, -1}});
  auto c = oracle_spgemm(a, b);
  ASSERT_EQ(c.nnz(), 1);
  EXPECT_EQ(c.values()[0], 0.0);
}

// The oracle itself checked against a dense triple loop.
TEST(OracleSpgemm, MatchesDenseTripleLoop) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(1, 200);
  std::uniform_real_distribution<double> dens(0.0, 0.1);
  for (int trial = 0; trial < 40; ++trial) {
    const index_t n = dim(rng), k = dim(rng), m = dim(rng);
    auto a = testing::random_csr(rng, n, k, dens(rng));
    auto b = testing::random_csr(rng, k, m, dens(rng));
    auto c = oracle_spgemm(a, b);
    ASSERT_TRUE(validate(c).empty());
    auto d = testing::dense_product(testing::to_dense(a), testing::to_dense(b));
    auto cd = testing::to_dense(c);
    for (std::size_t p = 0; p < d.v.size(); ++p) {
      ASSERT_EQ(cd.touched[p], d.touched[p]) << "structure differs at " << p;
      const double scale = std::max(std::abs(d.v[p]), std::abs(cd.v[p]));
      if (scale > 0) {
        // Both sides sum in the same order here, but compare by tolerance
        // as the contract states.
        ASSERT_LE(std::abs(d.v[p] - cd.v[p]), 1e-12 * scale);
      }
    }
  }
}

}  // namespace
}  // namespace spk
