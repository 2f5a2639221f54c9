#include <gtest/gtest.h>

#include <cmath>

#include "dlab/binlin.hpp"
#include "dlab/error.hpp"

using namespace dlab;

TEST(BitVector, StringAndIndexConventions) {
  const auto v = BitVector::from_string("1011");
  EXPECT_TRUE(v.get(0));
  EXPECT_FALSE(v.get(1));
  EXPECT_EQ(v.to_index(), 11u);
  EXPECT_EQ(BitVector::from_index(11, 4), v);
  EXPECT_EQ(v.to_string(), "1011");
  EXPECT_EQ(v.popcount(), 3u);
  EXPECT_TRUE(v.dot(BitVector::from_string("1000")));
  EXPECT_FALSE(v.dot(BitVector::from_string("1010")));
}

TEST(BitVector, WideVectorsSpanWords) {
  BitVector v(130);
  v.set(129, true);
  v.set(0, true);
  EXPECT_EQ(v.popcount(), 2u);
  BitVector w(130);
  w.set(129, true);
  EXPECT_TRUE(v.dot(w));
}

TEST(BinaryMatrix, RankOfKnownMatrices) {
  EXPECT_EQ(binlin::rank_f2(BinaryMatrix::identity(5)), 5u);
  EXPECT_EQ(binlin::rank_f2(BinaryMatrix::from_rows({"110", "011", "101"})), 2u);
  EXPECT_EQ(binlin::rank_f2(BinaryMatrix::from_rows({"110", "011", "111"})), 3u);
  EXPECT_EQ(binlin::rank_f2(BinaryMatrix(3, 4)), 0u);
}

TEST(BinaryMatrix, InverseProperty) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto m = binlin::sample_full_rank(6, 6, s);
    EXPECT_EQ(binlin::multiply(m, binlin::inverse(m)), BinaryMatrix::identity(6));
  }
  EXPECT_THROW(binlin::inverse(BinaryMatrix::from_rows({"11", "11"})), Error);
}

TEST(BinaryMatrix, CompleteBasisMakesInvertible) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t m = 1 + s % 5;
    const auto h = binlin::sample_full_rank(m, 6, s);
    const auto c = binlin::complete_basis(h);
    EXPECT_EQ(c.rows(), 6 - m);
    EXPECT_EQ(binlin::rank_f2(binlin::stack(h, c)), 6u);
  }
}

TEST(BinaryMatrix, DualBasisDeltaTable) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto h = binlin::sample_full_rank(5, 5, s);
    const auto g = binlin::dual_basis(h);
    for (std::size_t j = 0; j < 5; ++j)
      for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(g.row(j).dot(h.row(k)), j == k);
  }
}

TEST(BinaryMatrix, ToeplitzStructure) {
  const auto t = binlin::sample_toeplitz(3, 5, 7);
  for (std::size_t i = 1; i < 3; ++i)
    for (std::size_t j = 1; j < 5; ++j) EXPECT_EQ(t.get(i, j), t.get(i - 1, j - 1));
  const auto d = BitVector::from_string("1000000");
  const auto e = binlin::toeplitz(d, 3, 5);
  // Only the diagonal index n - 1 + i - j = 0, i.e. entry (0, 4), is set.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(e.get(i, j), i == 0 && j == 4);
}

TEST(BinaryMatrix, HashAppliesRowDotProducts) {
  const auto m = BinaryMatrix::from_rows({"110", "011"});
  for (std::uint64_t z = 0; z < 8; ++z) {
    const auto zv = BitVector::from_index(z, 3);
    const auto out = binlin::apply_hash(m, zv);
    EXPECT_EQ(out.get(0), m.row(0).dot(zv));
    EXPECT_EQ(out.get(1), m.row(1).dot(zv));
    EXPECT_EQ(binlin::apply_hash(m, z), out.to_index());
  }
}

TEST(BinaryMatrix, TextRoundTrip) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = binlin::sample_uniform(3 + s % 4, 5 + s, s);
    EXPECT_EQ(binlin::from_text(binlin::to_text(m)), m);
  }
  EXPECT_THROW(binlin::from_text("2 3\nz\n"), Error);
}

TEST(HashFamily, SamplingIsSeeded) {
  EXPECT_EQ(binlin::sample_full_rank(3, 5, 9), binlin::sample_full_rank(3, 5, 9));
  EXPECT_EQ(binlin::rank_f2(binlin::sample_full_rank(4, 4, 1)), 4u);
  HashFamilySpec spec{HashKind::Toeplitz, 6, 2, 3};
  EXPECT_EQ(binlin::sample(spec), binlin::sample_toeplitz(2, 6, 3));
}

TEST(HashFamily, TwoUniversalFamiliesExact) {
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t m = 1; m <= n; ++m)
      for (std::uint64_t a = 0; a < (1u << n); ++a)
        for (std::uint64_t b = a + 1; b < (1u << n); ++b) {
          const auto za = BitVector::from_index(a, n), zb = BitVector::from_index(b, n);
          const double target = std::ldexp(1.0, -static_cast<int>(m));
          EXPECT_NEAR(binlin::collision_probability({HashKind::UniformLinear, n, m, 0}, za, zb), target, 1e-15);
          EXPECT_NEAR(binlin::collision_probability({HashKind::Toeplitz, n, m, 0}, za, zb), target, 1e-15);
          // Full-rank maps: (2^{n-m} - 1) / (2^n - 1), never above 2^{-m}.
          const double fr = (std::ldexp(1.0, static_cast<int>(n - m)) - 1) / (std::ldexp(1.0, static_cast<int>(n)) - 1);
          EXPECT_NEAR(binlin::collision_probability({HashKind::FullRankLinear, n, m, 0}, za, zb), fr, 1e-15);
        }
}

TEST(HashFamily, EqualInputsRejected) {
  const auto z = BitVector::from_string("101");
  EXPECT_THROW(binlin::collision_probability({HashKind::UniformLinear, 3, 1, 0}, z, z), Error);
}
