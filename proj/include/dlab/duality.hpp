#pragma once

// Recoverability of Z versus secrecy of X on pure tripartite states, the
// explicit recovery measurements for the two structured cases, the
// compression/extraction repurposing maps and the uncertainty checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlab/binlin.hpp"
#include "dlab/protocols.hpp"
#include "dlab/qcore.hpp"

namespace dlab {

class TripartiteState {
 public:
  /// `a`, `b`, `r` must partition the subsystems of psi; `a` is non-empty.
  /// `b_copy` (a prefix of b) holds the X copy of A in case (a); `r_copy`
  /// (a subset of r) holds the Z copy of A in case (b).
  TripartiteState(PureStateVector psi, Subsystems a, Subsystems b, Subsystems r,
                  Subsystems b_copy = {}, Subsystems r_copy = {});

  const PureStateVector& psi() const { return psi_; }
  const Subsystems& a() const { return a_; }
  const Subsystems& b() const { return b_; }
  const Subsystems& r() const { return r_; }
  const Subsystems& b_copy() const { return b_copy_; }
  const Subsystems& r_copy() const { return r_copy_; }
  std::size_t dim_a() const;
  /// Number of qubits of A, or 0 when A is not a qubit register.
  std::size_t qubits_a() const;

 private:
  PureStateVector psi_;
  Subsystems a_, b_, r_, b_copy_, r_copy_;
};

struct DualityReport {
  std::string check;
  double epsilon = 0.0;   // measured input error
  double bound = 0.0;     // sqrt(2 epsilon)
  double achieved = 0.0;  // p_secure or p_guess
  double slack = 0.0;     // >= 0 when the inequality holds
  bool pass = false;
  std::size_t key_length = 0;
  std::size_t compressed_length = 0;
  std::optional<Povm> measurement;
  std::optional<double> coherent_overlap;
  std::string note;
};

struct UncertaintyResult {
  double h_x_r = 0.0;
  double h_z_b = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool vacuous = false;
};

enum class DualityCase { A, B };

namespace duality {

/// U|phi> = sum_z |z>_M (x) sqrt(Lambda_z)|phi>, output ordered M (x) B.
Isometry coherent_measurement(const Povm& decoder);

DualityReport verify_theorem1(const TripartiteState& state);

/// psi = sum_x sqrt(q_x) |x~>^A |x~>^{B1} |theta_x>^{B2 R}. The first
/// `b2_factors` factors of every theta are B2, the rest R.
TripartiteState build_case_a_state(const std::vector<double>& qx,
                                   const std::vector<PureStateVector>& theta, const Dims& a_dims,
                                   std::size_t b2_factors);
/// psi = sum_z sqrt(p_z) |z>^A |z>^{R1} |phi_z>^{B R2}. The first `b_factors`
/// factors of every phi are B, the rest R2.
TripartiteState build_case_b_state(const std::vector<double>& pz,
                                   const std::vector<PureStateVector>& phi, const Dims& a_dims,
                                   std::size_t b_factors);

TripartiteState random_tripartite(const Dims& a_dims, const Dims& b_dims, const Dims& r_dims,
                                  std::uint64_t seed);
/// With spread < 0 every theta_x (phi_z) is Haar random. Otherwise each is
/// a normalised perturbation, of the given size, of an ideal state: one
/// shared theta for case (a), phi_z = |z mod d_B>|0> for case (b).
TripartiteState random_case_a_state(const Dims& a_dims, const Dims& b2_dims, const Dims& r_dims,
                                    std::uint64_t seed, double spread = -1.0);
TripartiteState random_case_b_state(const Dims& a_dims, const Dims& b_dims, const Dims& r2_dims,
                                    std::uint64_t seed, double spread = -1.0);

DualityReport recover_measurement_case_a(const TripartiteState& state);
DualityReport recover_measurement_case_b(const TripartiteState& state);

/// Extractor g_perp paired with the compressor f: the bottom rows of
/// dual_basis((f; complete_basis(f))).
BinaryMatrix paired_extractor(const BinaryMatrix& f);
/// Compressor f_perp paired with the extractor g, by the same convention.
BinaryMatrix paired_compressor(const BinaryMatrix& g);

DualityReport csi_to_pa(const BinaryMatrix& f, const TripartiteState& state,
                        const CsiProtocol& decoder);
/// Uses the PGM decoder for f.
DualityReport csi_to_pa(const BinaryMatrix& f, const TripartiteState& state);
DualityReport pa_to_csi(const BinaryMatrix& g, const TripartiteState& state, DualityCase which);

UncertaintyResult check_uncertainty(const TripartiteState& state);
UncertaintyResult check_smooth_uncertainty(const TripartiteState& state, double delta);

TripartiteState ghz_fixture();
/// (|0> + i|1>)/sqrt2 on A times a Bell pair on BR.
TripartiteState phase_fixture();
/// Maximally entangled AB of local dimension d with a one-dimensional R.
TripartiteState max_entangled_fixture(std::size_t d);

}  // namespace duality
}  // namespace dlab
