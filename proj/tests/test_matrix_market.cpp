#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "spk/matrix_market.hpp"
#include "test_support.hpp"

namespace spk {
namespace {

const std::filesystem::path kFixtures = SPK_FIXTURE_DIR;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::IoError;
}

TEST(MatrixMarket, GeneralRealFile) {
  auto m = load_matrix_market(kFixtures / "a3.mtx");
  EXPECT_EQ(m, testing::a3());
}

TEST(MatrixMarket, SymmetricPatternExpands) {
  auto m = load_matrix_market(kFixtures / "sym_pattern.mtx");
  EXPECT_EQ(m.n_rows(), 2);
  ASSERT_EQ(m.nnz(), 2);
  EXPECT_EQ(m.values()[0], 1.0);
  EXPECT_EQ(m.values()[1], 1.0);
}

TEST(MatrixMarket, SymmetricDiagonalNotDuplicated) {
  auto m = parse_matrix_market(
      "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 3\n");
  ASSERT_EQ(m.nnz(), 3);
  EXPECT_EQ(to_triplets(m), (std::vector<Triplet>{{0, 0, 4}, {0, 1, 3}, {1, 0, 3}}));
}

TEST(MatrixMarket, IntegerFieldAndComments) {
  auto m = parse_matrix_market(
      "%%MatrixMarket matrix coordinate integer general\n% c\n%\n2 3 2\n1 3 -7\n\n2 1 5\n");
  EXPECT_EQ(to_triplets(m), (std::vector<Triplet>{{0, 2, -7}, {1, 0, 5}}));
}

TEST(MatrixMarket, SymmetrizeFlagMirrorsGeneral) {
  auto m = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 2.5\n",
                               /*symmetrize=*/true);
  EXPECT_EQ(to_triplets(m), (std::vector<Triplet>{{0, 1, 2.5}, {1, 0, 2.5}}));
}

TEST(MatrixMarket, Errors) {
  EXPECT_EQ(kind_of([] { load_matrix_market(kFixtures / "malformed.mtx"); }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1\n"); }),
            ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of([] {
              parse_matrix_market("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n");
            }),
            ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of([] { parse_matrix_market("not a banner\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] {
              parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
            }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] {
              parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
            }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { load_matrix_market(kFixtures / "does_not_exist.mtx"); }),
            ErrorKind::IoError);
}

TEST(MatrixMarket, WriteThenReadIsExact) {
  std::mt19937_64 rng(2);
  auto m = testing::random_csr(rng, 25, 31, 0.15);
  std::ostringstream out;
  write_matrix_market(out, m);
  EXPECT_EQ(parse_matrix_market(out.str()), m);
}

TEST(BinaryCsr, RoundTrip) {
  std::mt19937_64 rng(4);
  auto m = testing::random_csr(rng, 40, 12, 0.2);
  auto path = std::filesystem::temp_directory_path() / "spk_binary_roundtrip.csr";
  save_binary_csr(path, m);
  EXPECT_EQ(load_binary_csr(path), m);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace spk
