#pragma once

#include <cstddef>

namespace dlab {

/// Numerical tolerances shared by every module. The defaults are the values
/// test verdicts are pinned against; override once at startup, before any
/// worker threads exist.
struct NumericConfig {
  double hermitian_tol = 1e-10;   // max-entry norm of rho - rho^dagger
  double eigen_clamp = 1e-10;     // eigenvalues in [-clamp, 0) are set to zero
  double trace_tol = 1e-10;
  double norm_tol = 1e-10;        // pure-state normalisation
  double isometry_tol = 1e-9;
  double povm_tol = 1e-9;
  double prob_tol = 1e-10;

  double sdp_gap = 1e-7;          // accepted duality gap
  double sdp_target_gap = 1e-10;  // the solver keeps going until this or a stall
  int sdp_max_iter = 200;

  double case_detect = 1e-6;      // "H == 0" threshold for the structured cases
  double pgm_zero = 1e-12;        // PGM pseudo-inverse cutoff
  double bound_slack = 1e-9;      // additive slack on every verified inequality

  std::size_t max_dim = 256;      // dense envelope
  std::size_t max_sdp_dim = 64;
};

const NumericConfig& numeric_config();
void set_numeric_config(const NumericConfig& cfg);

}  // namespace dlab
