#include "dlab/stabilizer.hpp"

#include <bit>

#include <json.hpp>

#include "dlab/error.hpp"

namespace dlab {

SubsystemSplit::SubsystemSplit(BinaryMatrix f, BinaryMatrix f_perp)
    : f_(std::move(f)), f_perp_(std::move(f_perp)) {
  require(f_.cols() == f_perp_.cols(), ErrorCode::DimensionMismatch, "split: column mismatch");
  require(f_.cols() >= 1 && f_.cols() <= 8, ErrorCode::InvalidArgument, "split: n must be in 1..8");
  full_ = binlin::stack(f_, f_perp_);
  require(full_.rows() == full_.cols() && binlin::rank_f2(full_) == full_.cols(),
          ErrorCode::InvalidArgument, "split: (f; f_perp) is not invertible");
  map_ = stabilizer::linear_relabel(full_);
}

ComplexMatrix SubsystemSplit::relabel() const {
  const auto d = static_cast<Eigen::Index>(map_.size());
  ComplexMatrix p = ComplexMatrix::Zero(d, d);
  for (Eigen::Index z = 0; z < d; ++z) p(static_cast<Eigen::Index>(map_[static_cast<std::size_t>(z)]), z) = 1.0;
  return p;
}

namespace stabilizer {

ComplexMatrix pauli_operator(const PauliString& p) {
  const std::size_t n = p.support.size();
  require(n >= 1 && n <= 8, ErrorCode::InvalidArgument, "pauli_operator: n must be in 1..8");
  const std::size_t d = std::size_t{1} << n;
  const std::uint64_t s = p.support.to_index();
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t z = 0; z < d; ++z) {
    if (p.kind == PauliKind::Z)
      m(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(z)) = (std::popcount(z & s) & 1) ? -1.0 : 1.0;
    else
      m(static_cast<Eigen::Index>(z ^ s), static_cast<Eigen::Index>(z)) = 1.0;
  }
  return m;
}

int commutation_phase(const BitVector& g, const BitVector& h) { return g.dot(h) ? -1 : 1; }

SubsystemSplit build_split(const BinaryMatrix& f) {
  require(binlin::rank_f2(f) == f.rows(), ErrorCode::InvalidArgument, "build_split: f not full rank");
  return SubsystemSplit(f, binlin::complete_basis(f));
}

std::vector<std::size_t> linear_relabel(const BinaryMatrix& m) {
  require(m.rows() == m.cols(), ErrorCode::DimensionMismatch, "relabel: matrix not square");
  const std::size_t d = std::size_t{1} << m.cols();
  std::vector<std::size_t> map(d);
  for (std::size_t z = 0; z < d; ++z) map[z] = binlin::apply_hash(m, static_cast<std::uint64_t>(z));
  return map;
}

PureStateVector relabel_register(const PureStateVector& psi, const Subsystems& reg,
                                 const BinaryMatrix& m) {
  require(reg.size() == m.cols(), ErrorCode::DimensionMismatch, "relabel: register size mismatch");
  for (auto r : reg)
    require(r < psi.dims().size() && psi.dims()[r] == 2, ErrorCode::InvalidArgument,
            "relabel: register must consist of qubits");
  const auto map = linear_relabel(m);
  const ComplexMatrix rows = qcore::split_amplitudes(psi, reg);
  ComplexMatrix moved = ComplexMatrix::Zero(rows.rows(), rows.cols());
  for (std::size_t z = 0; z < map.size(); ++z)
    moved.row(static_cast<Eigen::Index>(map[z])) = rows.row(static_cast<Eigen::Index>(z));
  // Reassemble: the reshaped layout is (reg, rest ascending); permute back.
  const Subsystems rest = qcore::complement(reg, psi.dims().size());
  Dims dims;
  for (auto r : reg) dims.push_back(psi.dims()[r]);
  for (auto r : rest) dims.push_back(psi.dims()[r]);
  ComplexVector v(moved.size());
  for (Eigen::Index i = 0; i < moved.rows(); ++i)
    for (Eigen::Index j = 0; j < moved.cols(); ++j) v(i * moved.cols() + j) = moved(i, j);
  Subsystems order(psi.dims().size());
  Subsystems layout = reg;
  layout.insert(layout.end(), rest.begin(), rest.end());
  for (std::size_t k = 0; k < layout.size(); ++k) order[layout[k]] = k;
  return qcore::permute(PureStateVector::normalized(std::move(v), std::move(dims)), order);
}

EncodedCheckReport encoded_measurement_check(const SubsystemSplit& split) {
  return encoded_measurement_check(split, binlin::dual_basis(split.full()));
}

EncodedCheckReport encoded_measurement_check(const SubsystemSplit& split, const BinaryMatrix& dual) {
  const std::size_t n = split.n();
  const std::size_t d = std::size_t{1} << n;
  const BinaryMatrix& h = split.full();
  EncodedCheckReport rep;

  rep.measurement_ok = true;
  for (std::size_t j = 0; j < split.f().rows(); ++j) {
    const ComplexMatrix zh = pauli_operator({PauliKind::Z, split.f().row(j)});
    for (std::size_t z = 0; z < d; ++z) {
      const bool bit = binlin::apply_hash(split.f(), BitVector::from_index(z, n)).get(j);
      const auto zi = static_cast<Eigen::Index>(z);
      // |z> must be an eigenvector with eigenvalue (-1)^{f(z)_j}.
      ComplexVector e = ComplexVector::Zero(static_cast<Eigen::Index>(d));
      e(zi) = 1.0;
      const ComplexVector out = zh * e;
      if ((out - (bit ? -1.0 : 1.0) * e).norm() != 0.0) rep.measurement_ok = false;
    }
  }

  rep.conjugation_ok = true;
  const ComplexMatrix p = split.relabel();
  for (std::size_t j = 0; j < n; ++j) {
    BitVector wire(n);
    wire.set(j, true);
    const ComplexMatrix lhs = p * pauli_operator({PauliKind::Z, h.row(j)}) * p.adjoint();
    if ((lhs - pauli_operator({PauliKind::Z, wire})).cwiseAbs().maxCoeff() != 0.0)
      rep.conjugation_ok = false;
  }

  rep.anticommutation_ok = dual.rows() == n && dual.cols() == n;
  for (std::size_t j = 0; rep.anticommutation_ok && j < n; ++j) {
    const ComplexMatrix xg = pauli_operator({PauliKind::X, dual.row(j)});
    for (std::size_t k = 0; k < n; ++k) {
      const ComplexMatrix zh = pauli_operator({PauliKind::Z, h.row(k)});
      const double sign = j == k ? -1.0 : 1.0;
      if ((xg * zh - sign * zh * xg).cwiseAbs().maxCoeff() != 0.0) rep.anticommutation_ok = false;
    }
  }
  return rep;
}

std::size_t stabilized_dimension(const BinaryMatrix& h) {
  const std::size_t n = h.cols();
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  ComplexMatrix proj = ComplexMatrix::Identity(d, d);
  for (std::size_t j = 0; j < h.rows(); ++j)
    proj = proj * (0.5 * (ComplexMatrix::Identity(d, d) + pauli_operator({PauliKind::Z, h.row(j)})));
  const auto e = qcore::eigh(qcore::hermitian_part(proj));
  std::size_t count = 0;
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (e.values(k) > 0.5) ++count;
  return count;
}

std::string to_json(const SubsystemSplit& split) {
  nlohmann::json j{{"n", split.n()}, {"f", binlin::to_text(split.f())}, {"f_perp", binlin::to_text(split.f_perp())}};
  return j.dump();
}

SubsystemSplit split_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto n = j.at("n").get<std::size_t>();
    SubsystemSplit s(binlin::from_text(j.at("f").get<std::string>()),
                     binlin::from_text(j.at("f_perp").get<std::string>()));
    require(s.n() == n, ErrorCode::Io, "split: n does not match the matrices");
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, std::string("split: ") + e.what());
  }
}

}  // namespace stabilizer
}  // namespace dlab
