#include "dlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dlab/config.hpp"
#include "dlab/error.hpp"

namespace dlab {

SmoothingBall::SmoothingBall(double epsilon) : epsilon_(epsilon) {
  require(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument,
          "smoothing radius must lie in [0, 1)");
}

namespace entropy {

namespace {

double entropy_of(const RealVector& values) {
  const double clamp = numeric_config().eigen_clamp;
  double h = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double l = values(i);
    require(l >= -clamp, ErrorCode::InvalidState, "entropy: negative eigenvalue");
    if (l > 0.0) h -= l * std::log2(l);
  }
  return h;
}

struct Bipartition {
  ComplexMatrix rho;  // ordered (A, B)
  std::size_t da;
  std::size_t db;
};

Bipartition bipartition(const DensityOperator& rho, const Subsystems& b) {
  const std::size_t count = rho.dims().size();
  const Subsystems a = qcore::complement(b, count);
  require(!a.empty(), ErrorCode::InvalidArgument, "conditioning set covers every subsystem");
  Subsystems order = a;
  order.insert(order.end(), b.begin(), b.end());
  const DensityOperator p = qcore::permute(rho, order);
  std::size_t da = 1, db = 1;
  for (auto i : a) da *= rho.dims()[i];
  for (auto i : b) db *= rho.dims()[i];
  return {p.matrix(), da, db};
}

void check_envelope(std::size_t n) {
  require(n <= numeric_config().max_sdp_dim, ErrorCode::InvalidArgument,
          "dimension exceeds the SDP envelope");
}

[[noreturn]] void solver_failed(const sdp::Solution& s) {
  std::ostringstream os;
  os << "SDP did not converge: gap " << s.gap << ", primal infeasibility "
     << s.primal_infeasibility << ", dual infeasibility " << s.dual_infeasibility << " after "
     << s.iterations << " iterations";
  fail(ErrorCode::SolverFailure, os.str());
}

SdpSolution certificate(const sdp::Solution& s, double value) {
  SdpSolution out;
  out.value = value;
  out.gap = s.gap;
  out.primal = s.primal;
  out.dual = s.y;
  out.iterations = s.iterations;
  return out;
}

// Adds Re Tr(V Y) * scale to a 1x1 block (or the objective when block is npos).
void fidelity_terms(sdp::Problem& p, const sdp::ComplexVar& y, const ComplexMatrix& v,
                    std::size_t block, bool objective) {
  for (std::size_t a = 0; a < y.rows; ++a)
    for (std::size_t c = 0; c < y.cols; ++c) {
      const Complex w = v(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a));
      if (objective) {
        p.add_objective(y.re(a, c), w.real());
        p.add_objective(y.im(a, c), -w.imag());
      } else {
        p.add_coefficient(y.re(a, c), block, 0, 0, w.real());
        p.add_coefficient(y.im(a, c), block, 0, 0, -w.imag());
      }
    }
}

struct Support {
  ComplexMatrix v;  // n x r
  RealVector d;     // r
};

Support support_of(const ComplexMatrix& tau) {
  const auto e = qcore::eigh(qcore::hermitian_part(tau));
  const double cut = 1e-12 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (e.values(k) > cut) keep.push_back(k);
  Support s;
  s.v.resize(tau.rows(), static_cast<Eigen::Index>(keep.size()));
  s.d.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    s.v.col(static_cast<Eigen::Index>(j)) = e.vectors.col(keep[j]);
    s.d(static_cast<Eigen::Index>(j)) = e.values(keep[j]);
  }
  return s;
}

// tau on Z (x) C2 for the charge-zero sector of a purified cq state.
std::pair<ComplexMatrix, std::size_t> reduced_complement(const CqState& cq) {
  std::vector<ComplexMatrix> phi;
  std::size_t k = 1;
  for (const auto& c : cq.conditionals()) {
    const auto e = qcore::eigh(c.matrix());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = e.values.size(); j-- > 0;)
      if (e.values(j) > 1e-13) keep.push_back(j);
    ComplexMatrix m(e.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      m.col(static_cast<Eigen::Index>(j)) = std::sqrt(e.values(keep[j])) * e.vectors.col(keep[j]);
    k = std::max(k, keep.size());
    phi.push_back(std::move(m));
  }
  const auto kk = static_cast<Eigen::Index>(k);
  const auto d = static_cast<Eigen::Index>(cq.alphabet());
  for (auto& m : phi) {
    ComplexMatrix padded = ComplexMatrix::Zero(m.rows(), kk);
    padded.leftCols(m.cols()) = m;
    m = std::move(padded);
  }
  ComplexMatrix tau = ComplexMatrix::Zero(d * kk, d * kk);
  for (Eigen::Index z = 0; z < d; ++z)
    for (Eigen::Index w = 0; w < d; ++w) {
      const double s = std::sqrt(cq.probs()[static_cast<std::size_t>(z)] * cq.probs()[static_cast<std::size_t>(w)]);
      if (s == 0.0) continue;
      tau.block(z * kk, w * kk, kk, kk) =
          s * phi[static_cast<std::size_t>(z)].transpose() * phi[static_cast<std::size_t>(w)].conjugate();
    }
  return {tau, k};
}

}  // namespace

double von_neumann(const DensityOperator& rho) { return entropy_of(qcore::eigh(rho.matrix()).values); }

double shannon(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double cond_entropy(const DensityOperator& rho, const Subsystems& conditioned_on) {
  if (conditioned_on.empty()) return von_neumann(rho);
  return von_neumann(rho) - von_neumann(qcore::partial_trace(rho, conditioned_on));
}

double cond_entropy(const CqState& cq) {
  double h = shannon(cq.probs());
  for (std::size_t z = 0; z < cq.alphabet(); ++z)
    if (cq.probs()[z] > 0.0) h += cq.probs()[z] * von_neumann(cq.conditional(z));
  return h - von_neumann(cq.side_state());
}

CqState measured_cq(const PureStateVector& psi, Observable obs, const Subsystems& targets,
                    const Subsystems& side) {
  const auto basis = obs == Observable::Z ? qcore::Basis::Computational : qcore::Basis::Fourier;
  const CqState full = qcore::measure_basis(psi, basis, targets);
  const Subsystems rest = qcore::complement(targets, psi.dims().size());
  if (side.empty()) {
    std::vector<DensityOperator> trivial(full.alphabet(),
                                         DensityOperator(ComplexMatrix::Ones(1, 1), Dims{1}));
    return CqState(full.probs(), std::move(trivial));
  }
  Subsystems keep;
  for (auto s : side) {
    const auto it = std::find(rest.begin(), rest.end(), s);
    require(it != rest.end(), ErrorCode::InvalidArgument, "side subsystem overlaps the target");
    keep.push_back(static_cast<std::size_t>(it - rest.begin()));
  }
  return full.trace_side(keep);
}

double measured_cond_entropy(const PureStateVector& psi, Observable obs, std::size_t target,
                             const Subsystems& side) {
  return cond_entropy(measured_cq(psi, obs, Subsystems{target}, side));
}

double measured_cond_entropy(const PureStateVector& psi, Observable obs,
                             const Subsystems& targets, const Subsystems& side) {
  return cond_entropy(measured_cq(psi, obs, targets, side));
}

SdpSolution domination_program(const std::vector<ComplexMatrix>& tau, std::size_t copies,
                               const std::vector<std::size_t>& sigma_sizes, double epsilon,
                               const sdp::Options& opts) {
  require(!tau.empty() && !sigma_sizes.empty() && copies >= 1, ErrorCode::InvalidArgument,
          "domination program: empty input");
  const std::size_t inner = std::accumulate(sigma_sizes.begin(), sigma_sizes.end(), std::size_t{0});
  const std::size_t n = copies * inner;
  for (const auto& t : tau)
    require(static_cast<std::size_t>(t.rows()) == n && t.cols() == t.rows(),
            ErrorCode::DimensionMismatch, "domination program: block size mismatch");

  sdp::Problem p;
  std::vector<sdp::HermitianVar> sigma;
  for (auto s : sigma_sizes) {
    sigma.push_back(p.add_hermitian(s));
    p.add_trace_objective(sigma.back(), -1.0);
  }
  auto place_sigma = [&](std::size_t block) {
    for (std::size_t c = 0; c < copies; ++c) {
      std::size_t off = c * inner;
      for (const auto& s : sigma) {
        p.place_hermitian(block, s, off);
        off += s.size;
      }
    }
  };

  if (epsilon == 0.0) {
    for (const auto& t : tau) {
      const std::size_t blk = p.add_block(n);
      place_sigma(blk);
      p.add_constant(blk, 0, 0, -qcore::hermitian_part(t));
    }
  } else {
    const double c = std::sqrt(1.0 - epsilon * epsilon);
    struct Piece {
      Support s;
      sdp::HermitianVar rho;
      sdp::ComplexVar y;
    };
    std::vector<Piece> pieces;
    for (const auto& t : tau) {
      Support s = support_of(t);
      if (s.d.size() == 0) continue;
      Piece pc{std::move(s), p.add_hermitian(n), {}};
      pc.y = p.add_complex(static_cast<std::size_t>(pc.s.d.size()), n);
      pieces.push_back(std::move(pc));
    }
    require(!pieces.empty(), ErrorCode::InvalidState, "domination program: zero operator");
    for (const auto& pc : pieces) {
      const std::size_t r = static_cast<std::size_t>(pc.s.d.size());
      const std::size_t dom = p.add_block(n);
      place_sigma(dom);
      p.place_hermitian(dom, pc.rho, 0, -1.0);
      const std::size_t fid = p.add_block(r + n);
      p.add_constant(fid, 0, 0, pc.s.d.cast<Complex>().asDiagonal().toDenseMatrix());
      p.place_complex(fid, pc.y, 0, r);
      p.place_hermitian(fid, pc.rho, r);
    }
    const std::size_t fsum = p.add_block(1);
    p.add_constant(fsum, 0, 0, ComplexMatrix::Constant(1, 1, -c));
    const std::size_t tr = p.add_block(1);
    p.add_constant(tr, 0, 0, ComplexMatrix::Ones(1, 1));
    for (const auto& pc : pieces) {
      fidelity_terms(p, pc.y, pc.s.v, fsum, false);
      for (std::size_t k = 0; k < n; ++k) p.add_coefficient(pc.rho.first + k, tr, 0, 0, -1.0);
    }
  }

  const sdp::Solution s = p.solve(opts);
  if (!s.converged) solver_failed(s);
  return certificate(s, -s.value());
}

double min_entropy(const DensityOperator& rho, const Subsystems& conditioned_on,
                   const sdp::Options& opts, SdpSolution* cert) {
  const auto bp = bipartition(rho, conditioned_on);
  check_envelope(bp.da * bp.db);
  const auto sol = domination_program({bp.rho}, bp.da, {bp.db}, 0.0, opts);
  if (cert) *cert = sol;
  return -std::log2(sol.value);
}

namespace {

// rho_AC of a purification, with C the last subsystem.
DensityOperator complementary_marginal(const DensityOperator& rho, const Subsystems& b) {
  const std::size_t count = rho.dims().size();
  const Subsystems a = qcore::complement(b, count);
  const PureStateVector pur = qcore::purify(rho);
  Subsystems keep = a;
  keep.push_back(count);
  return qcore::partial_trace(pur, keep);
}

}  // namespace

double max_entropy(const DensityOperator& rho, const Subsystems& conditioned_on,
                   const sdp::Options& opts) {
  const DensityOperator ac = complementary_marginal(rho, conditioned_on);
  return -min_entropy(ac, Subsystems{ac.dims().size() - 1}, opts);
}

double smooth_min_entropy(const DensityOperator& rho, const Subsystems& conditioned_on,
                          SmoothingBall ball, const sdp::Options& opts) {
  if (ball.epsilon() == 0.0) return min_entropy(rho, conditioned_on, opts);
  const auto bp = bipartition(rho, conditioned_on);
  check_envelope(bp.da * bp.db);
  return -std::log2(domination_program({bp.rho}, bp.da, {bp.db}, ball.epsilon(), opts).value);
}

double smooth_max_entropy(const DensityOperator& rho, const Subsystems& conditioned_on,
                          SmoothingBall ball, const sdp::Options& opts) {
  const DensityOperator ac = complementary_marginal(rho, conditioned_on);
  return -smooth_min_entropy(ac, Subsystems{ac.dims().size() - 1}, ball, opts);
}

double max_entropy_direct(const DensityOperator& rho, const Subsystems& conditioned_on,
                          const sdp::Options& opts) {
  const auto bp = bipartition(rho, conditioned_on);
  check_envelope(bp.da * bp.db);
  const Support s = support_of(bp.rho);
  const std::size_t r = static_cast<std::size_t>(s.d.size());
  const std::size_t n = bp.da * bp.db;
  const std::size_t db = bp.db;

  sdp::Problem p;
  const std::size_t blk = p.add_block(r + n);
  p.add_constant(blk, 0, 0, s.d.cast<Complex>().asDiagonal().toDenseMatrix());
  // sigma with unit trace: the last diagonal entry is 1 - sum of the others.
  const std::size_t first = p.add_variables(db * db - 1);
  for (std::size_t c = 0; c < bp.da; ++c) {
    const std::size_t base = r + c * db;
    ComplexMatrix last = ComplexMatrix::Zero(1, 1);
    last(0, 0) = 1.0;
    p.add_constant(blk, base + db - 1, base + db - 1, last);
    std::size_t q = first;
    for (std::size_t k = 0; k + 1 < db; ++k, ++q) {
      p.add_coefficient(q, blk, base + k, base + k, 1.0);
      p.add_coefficient(q, blk, base + db - 1, base + db - 1, -1.0);
    }
    for (std::size_t k = 0; k < db; ++k)
      for (std::size_t l = k + 1; l < db; ++l, q += 2) {
        p.add_coefficient(q, blk, base + k, base + l, 1.0);
        p.add_coefficient(q, blk, base + l, base + k, 1.0);
        p.add_coefficient(q + 1, blk, base + k, base + l, Complex(0.0, 1.0));
        p.add_coefficient(q + 1, blk, base + l, base + k, Complex(0.0, -1.0));
      }
  }
  const sdp::ComplexVar y = p.add_complex(r, n);
  p.place_complex(blk, y, 0, r);
  fidelity_terms(p, y, s.v, 0, true);
  const sdp::Solution sol = p.solve(opts);
  if (!sol.converged) solver_failed(sol);
  return 2.0 * std::log2(sol.value());
}

double min_entropy(const CqState& cq, const sdp::Options& opts) {
  return smooth_min_entropy(cq, SmoothingBall(0.0), opts);
}

double max_entropy(const CqState& cq, const sdp::Options& opts) {
  return smooth_max_entropy(cq, SmoothingBall(0.0), opts);
}

double smooth_min_entropy(const CqState& cq, SmoothingBall ball, const sdp::Options& opts) {
  check_envelope(cq.side_dim());
  std::vector<ComplexMatrix> tau;
  for (std::size_t z = 0; z < cq.alphabet(); ++z)
    if (cq.probs()[z] > 0.0) tau.push_back(cq.probs()[z] * cq.conditional(z).matrix());
  return -std::log2(domination_program(tau, 1, {cq.side_dim()}, ball.epsilon(), opts).value);
}

double smooth_max_entropy(const CqState& cq, SmoothingBall ball, const sdp::Options& opts) {
  const auto [tau, k] = reduced_complement(cq);
  check_envelope(static_cast<std::size_t>(tau.rows()));
  const std::vector<std::size_t> sizes(cq.alphabet(), k);
  return std::log2(domination_program({tau}, 1, sizes, ball.epsilon(), opts).value);
}

GuessResult guessing_probability(const CqState& cq, const sdp::Options& opts) {
  const std::size_t d = cq.alphabet();
  const std::size_t s = cq.side_dim();
  require(d <= 32 && s <= 32, ErrorCode::InvalidArgument,
          "guessing probability: alphabet and side dimension are limited to 32");
  sdp::Problem p;
  const auto y = p.add_hermitian(s);
  p.add_trace_objective(y, -1.0);
  for (std::size_t z = 0; z < d; ++z) {
    const std::size_t blk = p.add_block(s);
    p.place_hermitian(blk, y, 0);
    p.add_constant(blk, 0, 0, -cq.probs()[z] * cq.conditional(z).matrix());
  }
  const sdp::Solution sol = p.solve(opts);
  if (!sol.converged) solver_failed(sol);

  // Clean the primal blocks into an exact POVM.
  std::vector<ComplexMatrix> lam;
  const auto sd = static_cast<Eigen::Index>(s);
  ComplexMatrix total = ComplexMatrix::Zero(sd, sd);
  for (const auto& z : sol.primal) {
    const auto e = qcore::eigh(qcore::hermitian_part(z));
    const RealVector vals = e.values.cwiseMax(0.0);
    lam.push_back(e.vectors * vals.cast<Complex>().asDiagonal() * e.vectors.adjoint());
    total += lam.back();
  }
  const auto et = qcore::eigh(qcore::hermitian_part(total));
  const ComplexMatrix inv_sqrt =
      et.vectors * et.values.cwiseMax(1e-300).cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
      et.vectors.adjoint();
  double value = 0.0;
  for (std::size_t z = 0; z < d; ++z) {
    lam[z] = qcore::hermitian_part(inv_sqrt * lam[z] * inv_sqrt);
    value += cq.probs()[z] * (lam[z] * cq.conditional(z).matrix()).trace().real();
  }
  return GuessResult{std::clamp(value, 0.0, 1.0), Povm(std::move(lam)), certificate(sol, -sol.value())};
}

}  // namespace entropy
}  // namespace dlab
