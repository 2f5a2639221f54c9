#include "dlab/binlin.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "dlab/error.hpp"

namespace dlab {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

BitVector random_bits(std::size_t n, std::mt19937_64& rng) {
  BitVector v(n);
  for (std::size_t j = 0; j < n; ++j) v.set(j, (rng() >> 63) != 0);
  return v;
}

}  // namespace

BitVector::BitVector(std::size_t n) : n_(n), words_(word_count(n), 0) {}

BitVector BitVector::from_string(const std::string& bits) {
  BitVector v(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) {
    require(bits[j] == '0' || bits[j] == '1', ErrorCode::InvalidArgument, "bit string: bad character");
    v.set(j, bits[j] == '1');
  }
  return v;
}

BitVector BitVector::from_index(std::uint64_t index, std::size_t n) {
  require(n <= 64, ErrorCode::InvalidArgument, "bit string too long for an index");
  BitVector v(n);
  for (std::size_t j = 0; j < n; ++j) v.set(j, (index >> (n - 1 - j)) & 1U);
  return v;
}

void BitVector::set(std::size_t j, bool v) {
  const std::uint64_t bit = std::uint64_t{1} << (j & 63);
  if (v) words_[j >> 6] |= bit;
  else words_[j >> 6] &= ~bit;
}

std::uint64_t BitVector::to_index() const {
  require(n_ <= 64, ErrorCode::InvalidArgument, "bit string too long for an index");
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < n_; ++j) idx = (idx << 1) | static_cast<std::uint64_t>(get(j));
  return idx;
}

std::string BitVector::to_string() const {
  std::string s(n_, '0');
  for (std::size_t j = 0; j < n_; ++j) if (get(j)) s[j] = '1';
  return s;
}

bool BitVector::any() const {
  for (auto w : words_) if (w) return true;
  return false;
}

std::size_t BitVector::popcount() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool BitVector::dot(const BitVector& other) const {
  require(n_ == other.n_, ErrorCode::DimensionMismatch, "inner product: length mismatch");
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
  return (std::popcount(acc) & 1) != 0;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  require(n_ == other.n_, ErrorCode::DimensionMismatch, "xor: length mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

BinaryMatrix BinaryMatrix::identity(std::size_t n) {
  BinaryMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BinaryMatrix BinaryMatrix::from_rows(const std::vector<std::string>& rows) {
  require(!rows.empty(), ErrorCode::InvalidArgument, "matrix: no rows");
  std::vector<BitVector> v;
  for (const auto& r : rows) v.push_back(BitVector::from_string(r));
  return from_rows(std::move(v), rows.front().size());
}

BinaryMatrix BinaryMatrix::from_rows(std::vector<BitVector> rows, std::size_t cols) {
  BinaryMatrix m(0, cols);
  for (auto& r : rows) {
    require(r.size() == cols, ErrorCode::DimensionMismatch, "matrix: ragged rows");
    m.rows_.push_back(std::move(r));
  }
  return m;
}

BinaryMatrix BinaryMatrix::transpose() const {
  BinaryMatrix t(cols_, rows());
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (get(i, j)) t.set(j, i, true);
  return t;
}

BinaryMatrix BinaryMatrix::slice_rows(std::size_t first, std::size_t count) const {
  require(first + count <= rows(), ErrorCode::InvalidArgument, "row slice out of range");
  BinaryMatrix m(0, cols_);
  for (std::size_t i = first; i < first + count; ++i) m.rows_.push_back(rows_[i]);
  return m;
}

namespace binlin {

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> echelon(std::vector<BitVector>& rows, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && !rows[p].get(c)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<BitVector> rows_of(const BinaryMatrix& m) {
  std::vector<BitVector> v;
  for (std::size_t i = 0; i < m.rows(); ++i) v.push_back(m.row(i));
  return v;
}

}  // namespace

std::size_t rank_f2(const BinaryMatrix& m) {
  auto rows = rows_of(m);
  return echelon(rows, m.cols()).size();
}

BinaryMatrix multiply(const BinaryMatrix& a, const BinaryMatrix& b) {
  require(a.cols() == b.rows(), ErrorCode::DimensionMismatch, "GF(2) product: shape mismatch");
  BinaryMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      if (a.get(i, k)) out.row(i) ^= b.row(k);
  return out;
}

BinaryMatrix stack(const BinaryMatrix& top, const BinaryMatrix& bottom) {
  require(top.cols() == bottom.cols(), ErrorCode::DimensionMismatch, "stack: column mismatch");
  auto rows = rows_of(top);
  for (std::size_t i = 0; i < bottom.rows(); ++i) rows.push_back(bottom.row(i));
  return BinaryMatrix::from_rows(std::move(rows), top.cols());
}

BinaryMatrix inverse(const BinaryMatrix& m) {
  const std::size_t n = m.rows();
  require(m.cols() == n, ErrorCode::DimensionMismatch, "inverse: matrix not square");
  // Gauss-Jordan on [m | I].
  std::vector<BitVector> aug;
  for (std::size_t i = 0; i < n; ++i) {
    BitVector r(2 * n);
    for (std::size_t j = 0; j < n; ++j) r.set(j, m.get(i, j));
    r.set(n + i, true);
    aug.push_back(std::move(r));
  }
  const auto piv = echelon(aug, n);
  require(piv.size() == n, ErrorCode::InvalidArgument, "matrix is singular over GF(2)");
  BinaryMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv.set(i, j, aug[i].get(n + j));
  return inv;
}

BinaryMatrix sample_uniform(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<BitVector> rows;
  for (std::size_t i = 0; i < m; ++i) rows.push_back(random_bits(n, rng));
  return BinaryMatrix::from_rows(std::move(rows), n);
}

BinaryMatrix sample_full_rank(std::size_t m, std::size_t n, std::uint64_t seed) {
  require(m <= n, ErrorCode::InvalidArgument, "full-rank sampling needs m <= n");
  std::mt19937_64 rng(seed);
  for (;;) {
    std::vector<BitVector> rows;
    for (std::size_t i = 0; i < m; ++i) rows.push_back(random_bits(n, rng));
    auto cand = BinaryMatrix::from_rows(std::move(rows), n);
    if (rank_f2(cand) == m) return cand;
  }
}

BinaryMatrix toeplitz(const BitVector& diagonals, std::size_t m, std::size_t n) {
  require(n >= 1 && diagonals.size() == n + m - 1, ErrorCode::DimensionMismatch,
          "toeplitz: need n + m - 1 diagonal bits");
  BinaryMatrix t(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) t.set(i, j, diagonals.get(i + n - 1 - j));
  return t;
}

BinaryMatrix sample_toeplitz(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return toeplitz(random_bits(n + m - 1, rng), m, n);
}

BinaryMatrix sample(const HashFamilySpec& spec) {
  require(spec.m <= spec.n, ErrorCode::InvalidArgument, "hash family needs m <= n");
  switch (spec.kind) {
    case HashKind::UniformLinear: return sample_uniform(spec.m, spec.n, spec.seed);
    case HashKind::Toeplitz: return sample_toeplitz(spec.m, spec.n, spec.seed);
    case HashKind::FullRankLinear: return sample_full_rank(spec.m, spec.n, spec.seed);
  }
  fail(ErrorCode::InvalidArgument, "unknown hash family");
}

BinaryMatrix complete_basis(const BinaryMatrix& h) {
  auto rows = rows_of(h);
  const auto piv = echelon(rows, h.cols());
  require(piv.size() == h.rows(), ErrorCode::InvalidArgument, "complete_basis: input not full rank");
  std::vector<bool> is_pivot(h.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<BitVector> extra;
  for (std::size_t c = 0; c < h.cols(); ++c)
    if (!is_pivot[c]) {
      BitVector e(h.cols());
      e.set(c, true);
      extra.push_back(std::move(e));
    }
  return BinaryMatrix::from_rows(std::move(extra), h.cols());
}

BinaryMatrix dual_basis(const BinaryMatrix& hfull) { return inverse(hfull.transpose()); }

BitVector apply_hash(const BinaryMatrix& m, const BitVector& z) {
  require(z.size() == m.cols(), ErrorCode::DimensionMismatch, "apply_hash: length mismatch");
  BitVector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out.set(i, m.row(i).dot(z));
  return out;
}

std::uint64_t apply_hash(const BinaryMatrix& m, std::uint64_t z) {
  return apply_hash(m, BitVector::from_index(z, m.cols())).to_index();
}

double collision_probability(const HashFamilySpec& spec, const BitVector& z1, const BitVector& z2) {
  require(z1.size() == spec.n && z2.size() == spec.n, ErrorCode::DimensionMismatch,
          "collision_probability: length mismatch");
  require(!(z1 == z2), ErrorCode::InvalidArgument, "collision_probability: inputs must differ");
  require(spec.m <= spec.n, ErrorCode::InvalidArgument, "hash family needs m <= n");
  const BitVector v = z1 ^ z2;
  const std::size_t n = spec.n, m = spec.m;
  switch (spec.kind) {
    case HashKind::UniformLinear: {
      // Rows are independent and uniform: enumerate one row, raise to m.
      require(n <= 12, ErrorCode::InvalidArgument, "exact mode supports n <= 12");
      std::uint64_t zero = 0;
      for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r)
        if (!BitVector::from_index(r, n).dot(v)) ++zero;
      return std::pow(static_cast<double>(zero) / static_cast<double>(std::uint64_t{1} << n),
                      static_cast<double>(m));
    }
    case HashKind::Toeplitz: {
      require(n + m - 1 <= 24, ErrorCode::InvalidArgument, "exact mode supports n + m - 1 <= 24");
      const std::uint64_t total = std::uint64_t{1} << (n + m - 1);
      std::uint64_t hits = 0;
      for (std::uint64_t d = 0; d < total; ++d)
        if (!apply_hash(toeplitz(BitVector::from_index(d, n + m - 1), m, n), v).any()) ++hits;
      return static_cast<double>(hits) / static_cast<double>(total);
    }
    case HashKind::FullRankLinear: {
      require(n * m <= 20, ErrorCode::InvalidArgument, "exact mode supports m * n <= 20");
      std::uint64_t hits = 0, members = 0;
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (n * m)); ++bits) {
        std::vector<BitVector> rows;
        for (std::size_t i = 0; i < m; ++i)
          rows.push_back(BitVector::from_index((bits >> (i * n)) & ((std::uint64_t{1} << n) - 1), n));
        const auto cand = BinaryMatrix::from_rows(std::move(rows), n);
        if (rank_f2(cand) != m) continue;
        ++members;
        if (!apply_hash(cand, v).any()) ++hits;
      }
      return static_cast<double>(hits) / static_cast<double>(members);
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown hash family");
}

std::string to_text(const BinaryMatrix& m) {
  static const char* digits = "0123456789abcdef";
  std::ostringstream os;
  os << m.rows() << ' ' << m.cols() << '\n';
  const std::size_t nd = (m.cols() + 3) / 4;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = 0; k < nd; ++k) {
      int v = 0;
      for (std::size_t b = 0; b < 4 && 4 * k + b < m.cols(); ++b)
        if (m.get(i, 4 * k + b)) v |= 1 << b;
      os << digits[v];
    }
    os << '\n';
  }
  return os.str();
}

BinaryMatrix from_text(const std::string& text) {
  std::istringstream is(text);
  std::size_t rows = 0, cols = 0;
  require(static_cast<bool>(is >> rows >> cols), ErrorCode::Io, "matrix text: missing header");
  require(cols >= 1, ErrorCode::Io, "matrix text: zero columns");
  const std::size_t nd = (cols + 3) / 4;
  BinaryMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::string line;
    require(static_cast<bool>(is >> line) && line.size() == nd, ErrorCode::Io,
            "matrix text: row " + std::to_string(i) + " has the wrong length");
    for (std::size_t k = 0; k < nd; ++k) {
      const int v = hex_value(line[k]);
      require(v >= 0, ErrorCode::Io, "matrix text: bad hex digit");
      for (std::size_t b = 0; b < 4; ++b) {
        const bool bit = (v >> b) & 1;
        if (4 * k + b < cols) m.set(i, 4 * k + b, bit);
        else require(!bit, ErrorCode::Io, "matrix text: padding bits must be zero");
      }
    }
  }
  return m;
}

}  // namespace binlin
}  // namespace dlab
