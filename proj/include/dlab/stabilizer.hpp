#pragma once

// Z- and X-type Pauli strings on n qubits and the relabelling permutation that
// splits a register according to a full-rank linear map f.

#include <string>
#include <vector>

#include "dlab/binlin.hpp"
#include "dlab/qcore.hpp"

namespace dlab {

enum class PauliKind { Z, X };

struct PauliString {
  PauliKind kind = PauliKind::Z;
  BitVector support;
};

/// Relabelling |z> -> |f(z)> (x) |f_perp(z)> of an n-qubit register.
class SubsystemSplit {
 public:
  /// Validates that (f; f_perp) is invertible.
  SubsystemSplit(BinaryMatrix f, BinaryMatrix f_perp);

  std::size_t n() const { return f_.cols(); }
  const BinaryMatrix& f() const { return f_; }
  const BinaryMatrix& f_perp() const { return f_perp_; }
  /// Stacked (f; f_perp).
  const BinaryMatrix& full() const { return full_; }
  /// relabel_map()[z] is the index of the image of basis state z.
  const std::vector<std::size_t>& relabel_map() const { return map_; }
  ComplexMatrix relabel() const;

 private:
  BinaryMatrix f_, f_perp_, full_;
  std::vector<std::size_t> map_;
};

struct EncodedCheckReport {
  bool measurement_ok = false;   // Z^{h_j} on |z> gives (-1)^{f(z)_j}
  bool conjugation_ok = false;   // relabel Z^{h_j} relabel^dagger = Z on wire j
  bool anticommutation_ok = false;  // X^{g_j} Z^{h_k} = (-1)^{delta_jk} Z^{h_k} X^{g_j}
  bool pass() const { return measurement_ok && conjugation_ok && anticommutation_ok; }
};

namespace stabilizer {

ComplexMatrix pauli_operator(const PauliString& p);
int commutation_phase(const BitVector& g, const BitVector& h);

SubsystemSplit build_split(const BinaryMatrix& f);

/// Permutation |z> -> |M z> on the computational basis of n qubits.
std::vector<std::size_t> linear_relabel(const BinaryMatrix& m);
/// Applies |z> -> |M z> to the qubits `reg` of psi (taken in the listed order,
/// first listed = most significant bit of z).
PureStateVector relabel_register(const PureStateVector& psi, const Subsystems& reg,
                                 const BinaryMatrix& m);

EncodedCheckReport encoded_measurement_check(const SubsystemSplit& split);
/// Same checks with an explicitly supplied dual basis (negative controls).
EncodedCheckReport encoded_measurement_check(const SubsystemSplit& split, const BinaryMatrix& dual);

/// Dimension of the common +1 eigenspace of the Z^{h} for the rows h of `h`.
std::size_t stabilized_dimension(const BinaryMatrix& h);

std::string to_json(const SubsystemSplit& split);
SubsystemSplit split_from_json(const std::string& text);

}  // namespace stabilizer
}  // namespace dlab
