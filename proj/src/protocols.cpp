#include "dlab/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "dlab/config.hpp"
#include "dlab/entropy.hpp"
#include "dlab/error.hpp"

namespace dlab {

namespace {

std::size_t register_bits(std::size_t alphabet) {
  std::size_t n = 0;
  while ((std::size_t{1} << (n + 1)) <= alphabet) ++n;
  return n;
}

void require_full_rank(const BinaryMatrix& m, const char* what) {
  require(m.rows() <= m.cols() && binlin::rank_f2(m) == m.rows(), ErrorCode::InvalidArgument, what);
}

std::size_t check_qubit_register(const PureStateVector& psi, const Subsystems& target) {
  for (auto t : target)
    require(t < psi.dims().size() && psi.dims()[t] == 2, ErrorCode::DimensionMismatch,
            "protocol register must consist of qubits");
  return target.size();
}

}  // namespace

PaProtocol::PaProtocol(BinaryMatrix extractor) : g_(std::move(extractor)) {
  require_full_rank(g_, "extractor must be full rank");
}

CsiProtocol::CsiProtocol(BinaryMatrix compressor, std::vector<Povm> decoders)
    : f_(std::move(compressor)), decoders_(std::move(decoders)) {
  require_full_rank(f_, "compressor must be full rank");
  require(decoders_.size() == (std::size_t{1} << f_.rows()), ErrorCode::DimensionMismatch,
          "one decoder per compressed value required");
  for (const auto& d : decoders_)
    require(d.size() == (std::size_t{1} << f_.cols()), ErrorCode::DimensionMismatch,
            "decoder must have one outcome per input string");
}

namespace protocols {

double p_secure(const CqState& cq) {
  const ComplexMatrix avg = cq.side_state().matrix() / static_cast<double>(cq.alphabet());
  double total = 0.0;
  for (std::size_t z = 0; z < cq.alphabet(); ++z)
    total += qcore::trace_norm_hermitian(cq.probs()[z] * cq.conditional(z).matrix() - avg);
  return std::clamp(0.5 * total, 0.0, 1.0);
}

double p_guess_with(const CqState& cq, const Povm& decoder) {
  require(decoder.size() == cq.alphabet(), ErrorCode::DimensionMismatch,
          "decoder needs one element per symbol");
  require(decoder.dim() == cq.side_dim(), ErrorCode::DimensionMismatch,
          "decoder acts on the wrong space");
  double s = 0.0;
  for (std::size_t z = 0; z < cq.alphabet(); ++z)
    s += cq.probs()[z] * (decoder[z] * cq.conditional(z).matrix()).trace().real();
  return std::clamp(s, 0.0, 1.0);
}

namespace {

std::vector<ComplexMatrix> pgm_elements(const std::vector<double>& probs,
                                        const std::vector<const ComplexMatrix*>& states,
                                        std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (std::size_t z = 0; z < probs.size(); ++z) s += probs[z] * *states[z];
  const auto e = qcore::eigh(qcore::hermitian_part(s));
  RealVector inv = RealVector::Zero(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (e.values(k) > numeric_config().pgm_zero) inv(k) = 1.0 / std::sqrt(e.values(k));
  const ComplexMatrix root = e.vectors * inv.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  std::vector<ComplexMatrix> out;
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t z = 0; z < probs.size(); ++z) {
    out.push_back(qcore::hermitian_part(root * (probs[z] * *states[z]) * root));
    sum += out.back();
  }
  out.front() += qcore::hermitian_part(ComplexMatrix::Identity(d, d) - sum);
  return out;
}

}  // namespace

Povm pgm(const CqState& cq) {
  std::vector<const ComplexMatrix*> states;
  for (const auto& c : cq.conditionals()) states.push_back(&c.matrix());
  return Povm(pgm_elements(cq.probs(), states, cq.side_dim()));
}

CqState coarse_grain(const CqState& cq, const BinaryMatrix& g) {
  require(cq.alphabet() == (std::size_t{1} << g.cols()), ErrorCode::DimensionMismatch,
          "coarse_grain: alphabet is not 2^n for the map's n");
  const std::size_t k = std::size_t{1} << g.rows();
  const auto s = static_cast<Eigen::Index>(cq.side_dim());
  std::vector<double> probs(k, 0.0);
  std::vector<ComplexMatrix> acc(k, ComplexMatrix::Zero(s, s));
  for (std::size_t z = 0; z < cq.alphabet(); ++z) {
    const auto key = binlin::apply_hash(g, static_cast<std::uint64_t>(z));
    probs[key] += cq.probs()[z];
    acc[key] += cq.probs()[z] * cq.conditional(z).matrix();
  }
  std::vector<DensityOperator> conds;
  for (std::size_t c = 0; c < k; ++c) {
    if (probs[c] > 0.0) {
      ComplexMatrix m = qcore::hermitian_part(acc[c] / probs[c]);
      m /= m.trace().real();
      conds.emplace_back(std::move(m), cq.side_dims());
    } else {
      conds.push_back(DensityOperator::maximally_mixed(cq.side_dims()));
    }
  }
  return CqState(std::move(probs), std::move(conds));
}

std::pair<CqState, ProtocolReport> run_pa(const PureStateVector& psi, const Subsystems& target,
                                          const Subsystems& adversary, const PaProtocol& g,
                                          Orientation orientation) {
  const std::size_t n = check_qubit_register(psi, target);
  require(g.extractor().cols() == n, ErrorCode::DimensionMismatch,
          "extractor width must equal the register size");
  const auto obs = orientation == Orientation::Standard ? entropy::Observable::X : entropy::Observable::Z;
  const CqState raw = entropy::measured_cq(psi, obs, target, adversary);
  CqState key = coarse_grain(raw, g.extractor());
  ProtocolReport rep;
  rep.input = "pure state";
  rep.metric = "p_secure";
  rep.n = n;
  rep.length = g.length();
  rep.achieved = p_secure(key);
  return {std::move(key), rep};
}

CsiProtocol build_csi(const CqState& cq, const BinaryMatrix& f) {
  require_full_rank(f, "compressor must be full rank");
  const std::size_t total = std::size_t{1} << f.cols();
  require(cq.alphabet() == total, ErrorCode::DimensionMismatch,
          "compressor width does not match the alphabet");
  const std::size_t k = std::size_t{1} << f.rows();
  const auto s = static_cast<Eigen::Index>(cq.side_dim());
  std::vector<std::vector<std::size_t>> cosets(k);
  for (std::size_t z = 0; z < total; ++z)
    cosets[binlin::apply_hash(f, static_cast<std::uint64_t>(z))].push_back(z);

  std::vector<Povm> decoders;
  for (std::size_t c = 0; c < k; ++c) {
    const auto& members = cosets[c];
    double pc = 0.0;
    for (auto z : members) pc += cq.probs()[z];
    std::vector<ComplexMatrix> elems(total, ComplexMatrix::Zero(s, s));
    if (pc > 0.0) {
      std::vector<double> probs;
      std::vector<const ComplexMatrix*> states;
      for (auto z : members) {
        probs.push_back(cq.probs()[z] / pc);
        states.push_back(&cq.conditional(z).matrix());
      }
      auto lam = pgm_elements(probs, states, cq.side_dim());
      for (std::size_t i = 0; i < members.size(); ++i) elems[members[i]] = std::move(lam[i]);
    } else {
      elems[members.front()] = ComplexMatrix::Identity(s, s);
    }
    decoders.emplace_back(std::move(elems));
  }
  return CsiProtocol(f, std::move(decoders));
}

double evaluate_csi(const CqState& cq, const CsiProtocol& protocol) {
  const BinaryMatrix& f = protocol.compressor();
  require(cq.alphabet() == (std::size_t{1} << f.cols()), ErrorCode::DimensionMismatch,
          "compressor width does not match the alphabet");
  double s = 0.0;
  for (std::size_t z = 0; z < cq.alphabet(); ++z) {
    const auto c = binlin::apply_hash(f, static_cast<std::uint64_t>(z));
    const Povm& dec = protocol.decoders()[c];
    require(dec.dim() == cq.side_dim(), ErrorCode::DimensionMismatch, "decoder acts on the wrong space");
    s += cq.probs()[z] * (dec[z] * cq.conditional(z).matrix()).trace().real();
  }
  return std::clamp(s, 0.0, 1.0);
}

std::pair<CsiProtocol, ProtocolReport> run_csi(const CqState& cq, const BinaryMatrix& f) {
  CsiProtocol proto = build_csi(cq, f);
  ProtocolReport rep;
  rep.input = "cq state";
  rep.metric = "p_guess";
  rep.n = f.cols();
  rep.length = f.rows();
  rep.achieved = evaluate_csi(cq, proto);
  return {std::move(proto), rep};
}

std::pair<CsiProtocol, ProtocolReport> run_csi(const PureStateVector& psi, const Subsystems& target,
                                               const Subsystems& side, const BinaryMatrix& f,
                                               Orientation orientation) {
  check_qubit_register(psi, target);
  const auto obs = orientation == Orientation::Standard ? entropy::Observable::Z : entropy::Observable::X;
  auto out = run_csi(entropy::measured_cq(psi, obs, target, side), f);
  out.second.input = "pure state";
  return out;
}

LengthBound pa_length_bound(const CqState& cq, double eps1, double eps2) {
  require(eps1 >= 0.0 && eps1 < 1.0 && eps2 > 0.0, ErrorCode::InvalidArgument,
          "length bound: need 0 <= eps1 < 1 and eps2 > 0");
  const std::size_t n = register_bits(cq.alphabet());
  const double h = entropy::smooth_min_entropy(cq, SmoothingBall(eps1));
  const double raw = h - 2.0 * std::log2(1.0 / eps2) + 2.0;
  const double fl = std::floor(raw + 1e-9);
  const std::size_t len = fl <= 0.0 ? 0 : std::min<std::size_t>(n, static_cast<std::size_t>(fl));
  return {len, h, raw};
}

LengthBound csi_length_bound(const CqState& cq, double eps1, double eps2) {
  require(eps1 >= 0.0 && eps1 < 1.0 && eps2 > 0.0, ErrorCode::InvalidArgument,
          "length bound: need 0 <= eps1 < 1 and eps2 > 0");
  const std::size_t n = register_bits(cq.alphabet());
  const double h = entropy::smooth_max_entropy(cq, SmoothingBall(eps1));
  const double raw = h + 2.0 * std::log2(1.0 / eps2) + 4.0;
  const double cl = std::ceil(raw - 1e-9);
  const std::size_t len = cl <= 0.0 ? 0 : std::min<std::size_t>(n, static_cast<std::size_t>(cl));
  return {len, h, raw};
}

}  // namespace protocols
}  // namespace dlab
