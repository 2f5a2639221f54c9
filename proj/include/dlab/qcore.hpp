#pragma once

// Dense complex linear algebra and quantum-state primitives: tensor products,
// partial traces, purifications, fidelity, trace distance, Uhlmann maps,
// basis measurements and seeded random states.
//
// Subsystem ordering is row-major throughout: the first entry of a dimension
// list is the most significant tensor factor.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;
using Subsystems = std::vector<std::size_t>;

std::size_t total_dim(const Dims& dims);

class PureStateVector {
 public:
  /// Throws InvalidState unless the vector has unit norm (config norm_tol)
  /// and its length matches the product of `dims`.
  PureStateVector(ComplexVector amplitudes, Dims dims);

  /// Normalises first; throws on a zero vector.
  static PureStateVector normalized(ComplexVector amplitudes, Dims dims);
  static PureStateVector basis_state(const Dims& dims, std::size_t index);

  const ComplexVector& amplitudes() const { return amplitudes_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

 private:
  ComplexVector amplitudes_;
  Dims dims_;
};

class DensityOperator {
 public:
  /// Validates Hermiticity, positivity (eigenvalues >= -eigen_clamp) and unit
  /// trace.
  DensityOperator(ComplexMatrix matrix, Dims dims);

  /// Smoothing works with trace <= 1; such operators are flagged.
  static DensityOperator subnormalized(ComplexMatrix matrix, Dims dims);
  static DensityOperator from_pure(const PureStateVector& psi);
  static DensityOperator maximally_mixed(const Dims& dims);

  const ComplexMatrix& matrix() const { return matrix_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  bool is_normalized() const { return normalized_; }

 private:
  DensityOperator(ComplexMatrix matrix, Dims dims, bool normalized);

  ComplexMatrix matrix_;
  Dims dims_;
  bool normalized_ = true;
};

class Isometry {
 public:
  /// Requires rows >= cols and V^dagger V = 1 within isometry_tol.
  Isometry(ComplexMatrix matrix, Dims in_dims, Dims out_dims);

  const ComplexMatrix& matrix() const { return matrix_; }
  const Dims& in_dims() const { return in_dims_; }
  const Dims& out_dims() const { return out_dims_; }

 private:
  ComplexMatrix matrix_;
  Dims in_dims_;
  Dims out_dims_;
};

class Povm {
 public:
  /// Each element PSD (eigenvalues >= -eigen_clamp), sum = 1 within povm_tol.
  explicit Povm(std::vector<ComplexMatrix> elements);

  std::size_t size() const { return elements_.size(); }
  std::size_t dim() const;
  const ComplexMatrix& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

 private:
  std::vector<ComplexMatrix> elements_;
};

/// sum_z p_z |z><z| (x) phi_z over the alphabet {0, ..., d-1}.
class CqState {
 public:
  CqState(std::vector<double> probs, std::vector<DensityOperator> conditionals);

  std::size_t alphabet() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  const DensityOperator& conditional(std::size_t z) const { return conditionals_[z]; }
  const std::vector<DensityOperator>& conditionals() const { return conditionals_; }
  const Dims& side_dims() const { return conditionals_.front().dims(); }
  std::size_t side_dim() const { return conditionals_.front().dim(); }

  /// The joint operator, dims = [alphabet] ++ side_dims.
  DensityOperator density() const;
  /// sum_z p_z phi_z.
  DensityOperator side_state() const;
  /// Keeps only the listed side subsystems in every conditional.
  CqState trace_side(const Subsystems& keep) const;

 private:
  std::vector<double> probs_;
  std::vector<DensityOperator> conditionals_;
};

namespace qcore {

// ---- dense helpers --------------------------------------------------------

struct HermitianEigen {
  RealVector values;    // ascending
  ComplexMatrix vectors;
};

HermitianEigen eigh(const ComplexMatrix& h);
/// Square root of a PSD matrix with clamped eigenvalues.
ComplexMatrix sqrt_psd(const ComplexMatrix& h);
/// Trace norm of a Hermitian matrix.
double trace_norm_hermitian(const ComplexMatrix& h);
/// ||sqrt(a) sqrt(b)||_1 for PSD matrices of any trace.
double fidelity_psd(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

// ---- tensor structure -----------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
DensityOperator kron(const DensityOperator& a, const DensityOperator& b);
PureStateVector kron(const PureStateVector& a, const PureStateVector& b);

/// Reorders tensor factors: factor k of the result is factor order[k] of the
/// input. `order` must be a permutation.
PureStateVector permute(const PureStateVector& psi, const Subsystems& order);
DensityOperator permute(const DensityOperator& rho, const Subsystems& order);

/// Amplitudes reshaped as a matrix whose row index runs over `rows` (in the
/// given order) and whose column index runs over the remaining subsystems in
/// ascending order.
ComplexMatrix split_amplitudes(const PureStateVector& psi, const Subsystems& rows);
Subsystems complement(const Subsystems& subsystems, std::size_t count);

/// Marginal on `keep`, ordered as listed.
DensityOperator partial_trace(const DensityOperator& rho, const Subsystems& keep);
DensityOperator partial_trace(const PureStateVector& psi, const Subsystems& keep);

/// Applies `op` to the joint space of `targets` (taken in the listed order).
/// The output is ordered as op's output space followed by the remaining
/// subsystems in ascending order; it is not renormalised.
ComplexVector apply_on(const PureStateVector& psi, const ComplexMatrix& op,
                       const Subsystems& targets);

// ---- state functionals ----------------------------------------------------

/// Purification with the ancilla appended as the last factor; the ancilla
/// dimension equals the numerical rank of rho (eigenvalues above 1e-13).
PureStateVector purify(const DensityOperator& rho);

double fidelity(const DensityOperator& rho, const DensityOperator& sigma);
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

struct UhlmannMap {
  Isometry map;
  /// True: `map` takes phi's purifying factors into psi's, and
  /// <psi|(1 (x) map)|phi> = overlap. False: it takes psi's purifying factors
  /// into phi's, and <phi|(1 (x) map)|psi> = overlap.
  bool acts_on_phi;
  double overlap;
};

/// Isometry between the purifying (non-shared) factors of two purifications
/// whose overlap equals the fidelity of the shared marginals. The smaller
/// purifying space is always the domain. Purifying factors are ordered
/// ascending within each state.
UhlmannMap uhlmann_isometry(const PureStateVector& psi, const Subsystems& psi_shared,
                            const PureStateVector& phi, const Subsystems& phi_shared);

// ---- randomness -----------------------------------------------------------

/// SplitMix64 finaliser applied to base + golden_gamma * (index + 1).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

PureStateVector haar_state(const Dims& dims, std::uint64_t seed);
/// Marginal of a Haar-random purification with `ancilla` purifying dimension.
DensityOperator random_density(const Dims& dims, std::size_t ancilla, std::uint64_t seed);
ComplexMatrix haar_unitary(std::size_t n, std::uint64_t seed);

// ---- measurements ---------------------------------------------------------

enum class Basis { Computational, Fourier };

/// Columns are the Fourier basis vectors |x~> = d^{-1/2} sum_z w^{-xz} |z>.
ComplexMatrix fourier_matrix(std::size_t d);

/// Measures `target` and returns the cq state of the outcome against all the
/// remaining subsystems (ascending order).
CqState measure_basis(const PureStateVector& psi, Basis basis, std::size_t target);
/// Measures several subsystems, each in `basis`. The outcome index is
/// mixed-radix over `targets` in the given order.
CqState measure_basis(const PureStateVector& psi, Basis basis, const Subsystems& targets);

}  // namespace qcore
}  // namespace dlab
