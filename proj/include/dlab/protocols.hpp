#pragma once

// Privacy amplification by linear hashing and compression with quantum side
// information decoded by the pretty good measurement.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlab/binlin.hpp"
#include "dlab/qcore.hpp"

namespace dlab {

class PaProtocol {
 public:
  /// Requires a full-rank extractor (zero rows allowed: the empty key).
  explicit PaProtocol(BinaryMatrix extractor);
  const BinaryMatrix& extractor() const { return g_; }
  std::size_t length() const { return g_.rows(); }

 private:
  BinaryMatrix g_;
};

class CsiProtocol {
 public:
  /// decoders[c] is a POVM over the full 2^n alphabet used when f(z) = c.
  CsiProtocol(BinaryMatrix compressor, std::vector<Povm> decoders);
  const BinaryMatrix& compressor() const { return f_; }
  const std::vector<Povm>& decoders() const { return decoders_; }
  std::size_t length() const { return f_.rows(); }

 private:
  BinaryMatrix f_;
  std::vector<Povm> decoders_;
};

struct ProtocolReport {
  std::string input;
  std::string metric;  // "p_secure" or "p_guess"
  std::size_t n = 0;
  std::size_t length = 0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double achieved = 0.0;
  std::optional<double> entropy;
  std::optional<double> bound;
  std::uint64_t seed = 0;
};

/// Standard: PA acts on the X outcome and CSI on the Z outcome of the same
/// register. Swapped exchanges the two bases.
enum class Orientation { Standard, Swapped };

namespace protocols {

double p_secure(const CqState& cq);
double p_guess_with(const CqState& cq, const Povm& decoder);
Povm pgm(const CqState& cq);

/// The cq state of g(z), symbols labelled as n-bit strings with component 0
/// the most significant bit.
CqState coarse_grain(const CqState& cq, const BinaryMatrix& g);

std::pair<CqState, ProtocolReport> run_pa(const PureStateVector& psi, const Subsystems& target,
                                          const Subsystems& adversary, const PaProtocol& g,
                                          Orientation orientation = Orientation::Standard);

/// PGM decoder per compressed value.
CsiProtocol build_csi(const CqState& cq, const BinaryMatrix& f);
/// Average success sum_z p_z Tr(Lambda^{f(z)}_z phi_z).
double evaluate_csi(const CqState& cq, const CsiProtocol& protocol);

std::pair<CsiProtocol, ProtocolReport> run_csi(const CqState& cq, const BinaryMatrix& f);
std::pair<CsiProtocol, ProtocolReport> run_csi(const PureStateVector& psi, const Subsystems& target,
                                               const Subsystems& side, const BinaryMatrix& f,
                                               Orientation orientation = Orientation::Standard);

struct LengthBound {
  std::size_t length;
  double entropy;  // the smooth entropy entering the formula
  double raw;      // the formula before rounding and clamping
};

/// floor(H_min^{eps1}(Z|S) - 2 log(1/eps2) + 2), clamped to [0, n] with
/// n = floor(log2 alphabet).
LengthBound pa_length_bound(const CqState& cq, double eps1, double eps2);
/// ceil(H_max^{eps1}(Z|S) + 2 log(1/eps2) + 4), clamped to [0, n].
LengthBound csi_length_bound(const CqState& cq, double eps1, double eps2);

}  // namespace protocols
}  // namespace dlab
