#pragma once

// Primal-dual interior-point solver for small complex Hermitian SDPs.
//
// Problems are posed as linear matrix inequalities over real variables y:
//
//   maximize  b^T y   subject to   F0_k + sum_i y_i F_i,k  >= 0  for every block k.
//
// The paired problem is  minimize sum_k Tr(F0_k Z_k)  s.t.  sum_k Tr(F_i,k Z_k) = -b_i,
// Z_k >= 0.  Weak duality puts b^T y below that value; the solver reports both.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "dlab/qcore.hpp"

namespace dlab::sdp {

struct Entry {
  std::size_t block;
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// Handle for a Hermitian matrix variable expanded into real parameters.
struct HermitianVar {
  std::size_t first = 0;  // index of the first real parameter
  std::size_t size = 0;
  /// Parameter layout: diagonal entries, then for each k < l the real and
  /// imaginary parts of entry (k, l).
  std::size_t count() const { return size * size; }
};

/// Handle for a complex rows x cols matrix variable (2 * rows * cols params).
struct ComplexVar {
  std::size_t first = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t count() const { return 2 * rows * cols; }
  std::size_t re(std::size_t r, std::size_t c) const { return first + 2 * (r * cols + c); }
  std::size_t im(std::size_t r, std::size_t c) const { return re(r, c) + 1; }
};

struct Options {
  std::ostream* trace = nullptr;  // one NDJSON record per iteration
};

struct Solution {
  RealVector y;
  std::vector<ComplexMatrix> slack;   // F(y) per block
  std::vector<ComplexMatrix> primal;  // Z per block
  double dual_value = 0.0;            // b^T y
  double primal_value = 0.0;          // sum Tr(F0 Z)
  double gap = 0.0;                   // |primal - dual| / (1 + |primal| + |dual|)
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  bool converged = false;

  double value() const { return 0.5 * (dual_value + primal_value); }
};

class Problem {
 public:
  std::size_t add_block(std::size_t size);
  std::size_t add_variables(std::size_t count);
  HermitianVar add_hermitian(std::size_t size);
  ComplexVar add_complex(std::size_t rows, std::size_t cols);

  std::size_t variable_count() const { return objective_.size(); }
  std::size_t block_count() const { return sizes_.size(); }
  std::size_t block_size(std::size_t k) const { return sizes_[k]; }

  void set_objective(std::size_t var, double coeff) { objective_[var] = coeff; }
  void add_objective(std::size_t var, double coeff) { objective_[var] += coeff; }

  /// Adds `m` into F0 of `block` with its top-left corner at (row, col).
  /// The caller is responsible for Hermitian completion.
  void add_constant(std::size_t block, std::size_t row, std::size_t col, const ComplexMatrix& m);
  /// Adds `value` at (row, col) of F_var. No automatic completion.
  void add_coefficient(std::size_t var, std::size_t block, std::size_t row, std::size_t col,
                       Complex value);

  /// Places scale * kron(I_copies, H) on the diagonal of `block` starting at `offset`.
  void place_hermitian(std::size_t block, const HermitianVar& h, std::size_t offset,
                       double scale = 1.0, std::size_t copies = 1);
  /// Places scale * Y at (row, col) and its adjoint at (col, row).
  void place_complex(std::size_t block, const ComplexVar& y, std::size_t row, std::size_t col,
                     double scale = 1.0);
  /// Objective += scale * Tr(H) (real).
  void add_trace_objective(const HermitianVar& h, double scale);

  Solution solve(const Options& options = {}) const;

  /// Reads the value of a Hermitian variable out of y.
  static ComplexMatrix value(const HermitianVar& h, const RealVector& y);
  static ComplexMatrix value(const ComplexVar& v, const RealVector& y);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<ComplexMatrix> constants_;
  std::vector<double> objective_;
  std::vector<std::vector<Entry>> coefficients_;  // per variable
};

}  // namespace dlab::sdp
