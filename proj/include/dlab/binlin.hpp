#pragma once

// Linear algebra over GF(2) and linear hash families.
//
// Bits are packed into 64-bit words, bit j of a vector living in word j / 64 at
// position j % 64. Component 0 of a bit string is the most significant digit
// when the string is read as a basis-state index of an n-qubit register.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dlab {

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n);
  /// From a string of '0'/'1' characters, component 0 first.
  static BitVector from_string(const std::string& bits);
  /// Component j equals bit (n-1-j) of `index`.
  static BitVector from_index(std::uint64_t index, std::size_t n);

  std::size_t size() const { return n_; }
  bool get(std::size_t j) const { return (words_[j >> 6] >> (j & 63)) & 1U; }
  void set(std::size_t j, bool v);
  void flip(std::size_t j) { words_[j >> 6] ^= std::uint64_t{1} << (j & 63); }

  std::uint64_t to_index() const;
  std::string to_string() const;
  bool any() const;
  std::size_t popcount() const;
  /// Inner product over GF(2).
  bool dot(const BitVector& other) const;
  BitVector& operator^=(const BitVector& other);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend bool operator==(const BitVector&, const BitVector&) = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols);
  static BinaryMatrix identity(std::size_t n);
  /// Rows given as '0'/'1' strings of equal length.
  static BinaryMatrix from_rows(const std::vector<std::string>& rows);
  static BinaryMatrix from_rows(std::vector<BitVector> rows, std::size_t cols);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  const BitVector& row(std::size_t i) const { return rows_[i]; }
  BitVector& row(std::size_t i) { return rows_[i]; }
  bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
  void set(std::size_t i, std::size_t j, bool v) { rows_[i].set(j, v); }

  BinaryMatrix transpose() const;
  /// Rows [first, first + count).
  BinaryMatrix slice_rows(std::size_t first, std::size_t count) const;
  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<BitVector> rows_;
};

enum class HashKind { UniformLinear, Toeplitz, FullRankLinear };

struct HashFamilySpec {
  HashKind kind = HashKind::UniformLinear;
  std::size_t n = 1;
  std::size_t m = 1;
  std::uint64_t seed = 0;
};

namespace binlin {

std::size_t rank_f2(const BinaryMatrix& m);
BinaryMatrix multiply(const BinaryMatrix& a, const BinaryMatrix& b);
/// Rows of `top` followed by rows of `bottom`.
BinaryMatrix stack(const BinaryMatrix& top, const BinaryMatrix& bottom);
/// Inverse of a square invertible matrix; throws InvalidArgument when singular.
BinaryMatrix inverse(const BinaryMatrix& m);

/// Uniform over full-rank m x n matrices (rejection sampling).
BinaryMatrix sample_full_rank(std::size_t m, std::size_t n, std::uint64_t seed);
/// Uniform over all m x n matrices.
BinaryMatrix sample_uniform(std::size_t m, std::size_t n, std::uint64_t seed);
/// Toeplitz matrix from n + m - 1 uniformly random diagonal bits.
BinaryMatrix sample_toeplitz(std::size_t m, std::size_t n, std::uint64_t seed);
BinaryMatrix sample(const HashFamilySpec& spec);
/// Toeplitz matrix with T(i, j) = diag[i - j + n - 1].
BinaryMatrix toeplitz(const BitVector& diagonals, std::size_t m, std::size_t n);

/// (n - m) x n rows completing a full-rank H to an invertible matrix: unit
/// vectors on the non-pivot columns of H's echelon form.
BinaryMatrix complete_basis(const BinaryMatrix& h);
/// G = (Hfull^T)^{-1}, so that g_j . h_k = delta_jk.
BinaryMatrix dual_basis(const BinaryMatrix& hfull);

BitVector apply_hash(const BinaryMatrix& m, const BitVector& z);
/// Same map on integer basis-state labels (component 0 most significant).
std::uint64_t apply_hash(const BinaryMatrix& m, std::uint64_t z);

/// Exact probability over the family that z1 and z2 collide.
double collision_probability(const HashFamilySpec& spec, const BitVector& z1, const BitVector& z2);

/// Text form: "m n" then one hex row per line. Hex digit k carries bits
/// 4k..4k+3 of the row with bit 4k as its least significant bit.
std::string to_text(const BinaryMatrix& m);
BinaryMatrix from_text(const std::string& text);

}  // namespace binlin
}  // namespace dlab
