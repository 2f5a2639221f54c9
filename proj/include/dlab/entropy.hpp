#pragma once

// Entropy functionals in bits: von Neumann, conditional, measured conditional,
// min/max entropies and their smoothed versions, optimal guessing probability.

#include <vector>

#include "dlab/qcore.hpp"
#include "dlab/sdp.hpp"

namespace dlab {

/// Purification-distance ball of radius epsilon over subnormalised states.
class SmoothingBall {
 public:
  explicit SmoothingBall(double epsilon);
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

/// Optimal value of an entropy SDP together with its certificate.
struct SdpSolution {
  double value = 0.0;
  double gap = 0.0;
  std::vector<ComplexMatrix> primal;
  RealVector dual;
  int iterations = 0;
};

struct GuessResult {
  double p_guess;
  Povm povm;
  SdpSolution certificate;
};

namespace entropy {

enum class Observable { Z, X };

double von_neumann(const DensityOperator& rho);
double shannon(const std::vector<double>& probs);

/// H(A|B) with B = conditioned_on and A the remaining subsystems.
double cond_entropy(const DensityOperator& rho, const Subsystems& conditioned_on);
/// H(Z|S) of a cq state.
double cond_entropy(const CqState& cq);

/// Measures `target` (one subsystem or several, each in the given basis),
/// keeps `side`, and returns H(outcome|side).
double measured_cond_entropy(const PureStateVector& psi, Observable obs, std::size_t target,
                             const Subsystems& side);
double measured_cond_entropy(const PureStateVector& psi, Observable obs,
                             const Subsystems& targets, const Subsystems& side);
/// The cq state used by measured_cond_entropy, with side in the listed order.
CqState measured_cq(const PureStateVector& psi, Observable obs, const Subsystems& targets,
                    const Subsystems& side);

double min_entropy(const DensityOperator& rho, const Subsystems& conditioned_on,
                   const sdp::Options& opts = {}, SdpSolution* cert = nullptr);
/// Via H_max(A|B) = -H_min(A|C) on a purification.
double max_entropy(const DensityOperator& rho, const Subsystems& conditioned_on,
                   const sdp::Options& opts = {});
/// Direct fidelity formulation: max over sigma_B of 2 log F(rho, 1 (x) sigma).
double max_entropy_direct(const DensityOperator& rho, const Subsystems& conditioned_on,
                          const sdp::Options& opts = {});

double smooth_min_entropy(const DensityOperator& rho, const Subsystems& conditioned_on,
                          SmoothingBall ball, const sdp::Options& opts = {});
double smooth_max_entropy(const DensityOperator& rho, const Subsystems& conditioned_on,
                          SmoothingBall ball, const sdp::Options& opts = {});

// cq specialisations: H(Z|S) with the symbol register classical.
double min_entropy(const CqState& cq, const sdp::Options& opts = {});
double max_entropy(const CqState& cq, const sdp::Options& opts = {});
double smooth_min_entropy(const CqState& cq, SmoothingBall ball, const sdp::Options& opts = {});
double smooth_max_entropy(const CqState& cq, SmoothingBall ball, const sdp::Options& opts = {});

GuessResult guessing_probability(const CqState& cq, const sdp::Options& opts = {});

/// Core smoothed domination program shared by all routes:
///   minimise sum_j Tr sigma_j
///   s.t. kron(I_copies, blockdiag(sigma_j)) >= rho_bar_k for every k,
///        sum_k F(tau_k, rho_bar_k) >= sqrt(1 - eps^2), sum_k Tr rho_bar_k <= 1.
/// With eps = 0 the rho_bar_k are pinned to tau_k.
SdpSolution domination_program(const std::vector<ComplexMatrix>& tau, std::size_t copies,
                               const std::vector<std::size_t>& sigma_sizes, double epsilon,
                               const sdp::Options& opts = {});

}  // namespace entropy
}  // namespace dlab
