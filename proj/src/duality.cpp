#include "dlab/duality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dlab/config.hpp"
#include "dlab/entropy.hpp"
#include "dlab/error.hpp"
#include "dlab/stabilizer.hpp"

namespace dlab {

namespace {

using entropy::Observable;

Dims dims_of(const PureStateVector& psi, const Subsystems& subs) {
  Dims d;
  for (auto s : subs) d.push_back(psi.dims()[s]);
  return d;
}

Subsystems range(std::size_t first, std::size_t count) {
  Subsystems s(count);
  std::iota(s.begin(), s.end(), first);
  return s;
}

Subsystems concat(std::initializer_list<const Subsystems*> parts) {
  Subsystems out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

// Columns are the product Fourier vectors |x~> over the factors of `dims`.
ComplexMatrix fourier_of(const Dims& dims) {
  ComplexMatrix f = ComplexMatrix::Identity(1, 1);
  for (auto d : dims) f = qcore::kron(f, qcore::fourier_matrix(d));
  return f;
}

std::vector<std::size_t> digits_of(std::size_t index, const Dims& dims) {
  std::vector<std::size_t> digits(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
  return digits;
}

std::size_t index_of(const std::vector<std::size_t>& digits, const Dims& dims) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
  return idx;
}

std::size_t negate(std::size_t index, const Dims& dims) {
  auto d = digits_of(index, dims);
  for (std::size_t k = 0; k < dims.size(); ++k) d[k] = (dims[k] - d[k]) % dims[k];
  return index_of(d, dims);
}

std::vector<double> weights_from(const PureStateVector& v) {
  std::vector<double> w;
  for (Eigen::Index i = 0; i < v.amplitudes().size(); ++i) w.push_back(std::norm(v.amplitudes()(i)));
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

PureStateVector perturb(const PureStateVector& ideal, const PureStateVector& noise, double spread) {
  if (spread < 0.0) return noise;
  return PureStateVector::normalized(ideal.amplitudes() + spread * noise.amplitudes(), ideal.dims());
}

double p_secure_x_r(const TripartiteState& st) {
  return protocols::p_secure(entropy::measured_cq(st.psi(), Observable::X, st.a(), st.r()));
}

void finish_recovery(DualityReport& rep, double p_guess, double eps) {
  rep.epsilon = eps;
  rep.bound = std::sqrt(2.0 * eps);
  rep.achieved = p_guess;
  rep.slack = p_guess - (1.0 - rep.bound);
  rep.pass = rep.slack >= -numeric_config().bound_slack;
}

Povm case_a_povm(const TripartiteState& st) {
  const auto& psi = st.psi();
  const Subsystems& a = st.a();
  const Subsystems& b1 = st.b_copy();
  const Subsystems b2(st.b().begin() + static_cast<std::ptrdiff_t>(b1.size()), st.b().end());
  const Subsystems& r = st.r();
  require(!r.empty(), ErrorCode::Precondition, "case (a) recovery needs a non-trivial R");

  const PureStateVector pc = qcore::permute(psi, concat({&a, &b1, &b2, &r}));
  const Dims a_dims = dims_of(psi, a);
  const Dims b2_dims = dims_of(psi, b2);
  const Dims r_dims = dims_of(psi, r);
  const std::size_t na = a.size(), nb2 = b2.size(), nr = r.size();
  const std::size_t da = total_dim(a_dims), db2 = total_dim(b2_dims);
  const std::size_t dmb = da * da * db2;
  require(dmb <= numeric_config().max_dim, ErrorCode::InvalidArgument, "case (a): state too large");

  const ComplexMatrix fa = fourier_of(a_dims);
  ComplexMatrix m = qcore::split_amplitudes(pc, range(0, 2 * na));
  m = qcore::kron(fa.adjoint(), fa.adjoint()) * m;

  Dims theta_dims = b2_dims;
  theta_dims.insert(theta_dims.end(), r_dims.begin(), r_dims.end());
  const Subsystems theta_shared = range(nb2, nr);
  const Subsystems psi_shared = range(2 * na + nb2, nr);

  std::vector<ComplexMatrix> w(da);
  for (std::size_t x = 0; x < da; ++x) {
    const ComplexVector row = m.row(static_cast<Eigen::Index>(x * da + x)).transpose();
    if (row.squaredNorm() > 1e-14) {
      const PureStateVector theta = PureStateVector::normalized(row, theta_dims);
      const auto u = qcore::uhlmann_isometry(theta, theta_shared, pc, psi_shared);
      require(!u.acts_on_phi, ErrorCode::InvalidState, "case (a): unexpected Uhlmann orientation");
      w[x] = u.map.matrix();
    } else {
      w[x] = ComplexMatrix::Identity(static_cast<Eigen::Index>(dmb), static_cast<Eigen::Index>(db2));
    }
  }

  const auto db = static_cast<Eigen::Index>(da * db2);
  const auto d2 = static_cast<Eigen::Index>(db2);
  std::vector<ComplexMatrix> lam;
  for (std::size_t z = 0; z < da; ++z) {
    const auto nz = static_cast<Eigen::Index>(negate(z, a_dims));
    ComplexMatrix t = ComplexMatrix::Zero(static_cast<Eigen::Index>(dmb), db);
    for (Eigen::Index b1v = 0; b1v < static_cast<Eigen::Index>(da); ++b1v)
      for (Eigen::Index x = 0; x < static_cast<Eigen::Index>(da); ++x)
        t.middleCols(b1v * d2, d2) += fa(nz, x) * std::conj(fa(b1v, x)) * w[static_cast<std::size_t>(x)];
    lam.push_back(qcore::hermitian_part(t.adjoint() * t));
  }
  return Povm(std::move(lam));
}

Povm case_b_povm(const TripartiteState& st) {
  const auto& psi = st.psi();
  const Subsystems& a = st.a();
  const Subsystems& b = st.b();
  const Subsystems& r = st.r();
  const PureStateVector pc = qcore::permute(psi, concat({&a, &b, &r}));
  const Dims a_dims = dims_of(psi, a);
  const Dims b_dims = dims_of(psi, b);
  const Dims r_dims = dims_of(psi, r);
  const std::size_t na = a.size(), nb = b.size(), nr = r.size();
  const std::size_t da = total_dim(a_dims), db = total_dim(b_dims);
  require(da * db <= numeric_config().max_dim, ErrorCode::InvalidArgument, "case (b): state too large");

  std::vector<std::size_t> copy_pos;
  for (auto s : st.r_copy())
    copy_pos.push_back(nb + static_cast<std::size_t>(std::find(r.begin(), r.end(), s) - r.begin()));
  Dims rest_dims = b_dims;
  rest_dims.insert(rest_dims.end(), r_dims.begin(), r_dims.end());

  // theta^{BR} = sum_z <z|^A P_{R1 = z} psi.
  const ComplexMatrix m = qcore::split_amplitudes(pc, range(0, na));
  ComplexVector theta(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const auto digits = digits_of(static_cast<std::size_t>(j), rest_dims);
    std::vector<std::size_t> zd;
    for (auto p : copy_pos) zd.push_back(digits[p]);
    theta(j) = m(static_cast<Eigen::Index>(index_of(zd, a_dims)), j);
  }
  const PureStateVector th = PureStateVector::normalized(theta, rest_dims);
  const auto u = qcore::uhlmann_isometry(th, range(nb, nr), pc, range(na + nb, nr));
  require(!u.acts_on_phi, ErrorCode::InvalidState, "case (b): unexpected Uhlmann orientation");
  const ComplexMatrix& w = u.map.matrix();  // (A B) x B
  std::vector<ComplexMatrix> lam;
  const auto dbi = static_cast<Eigen::Index>(db);
  for (std::size_t z = 0; z < da; ++z) {
    const ComplexMatrix wz = w.middleRows(static_cast<Eigen::Index>(z) * dbi, dbi);
    lam.push_back(qcore::hermitian_part(wz.adjoint() * wz));
  }
  return Povm(std::move(lam));
}

void check_case(const TripartiteState& st, DualityCase which) {
  const double tol = numeric_config().case_detect;
  if (which == DualityCase::A) {
    require(!st.b_copy().empty() && dims_of(st.psi(), st.b_copy()) == dims_of(st.psi(), st.a()),
            ErrorCode::Precondition, "case (a) needs a B1 register matching A");
    const double h = entropy::measured_cond_entropy(st.psi(), Observable::X, st.a(), st.b());
    require(h <= tol, ErrorCode::Precondition, "case (a) requires H(X^A|B) = 0");
  } else {
    require(!st.r_copy().empty() && dims_of(st.psi(), st.r_copy()) == dims_of(st.psi(), st.a()),
            ErrorCode::Precondition, "case (b) needs an R1 register matching A");
    const double h = entropy::measured_cond_entropy(st.psi(), Observable::Z, st.a(), st.r());
    require(h <= tol, ErrorCode::Precondition, "case (b) requires H(Z^A|R) = 0");
  }
}

BinaryMatrix dual_rows(const BinaryMatrix& m) {
  require(binlin::rank_f2(m) == m.rows(), ErrorCode::InvalidArgument, "map must be full rank");
  const BinaryMatrix g = binlin::dual_basis(binlin::stack(m, binlin::complete_basis(m)));
  return g.slice_rows(m.rows(), m.cols() - m.rows());
}

}  // namespace

TripartiteState::TripartiteState(PureStateVector psi, Subsystems a, Subsystems b, Subsystems r,
                                 Subsystems b_copy, Subsystems r_copy)
    : psi_(std::move(psi)), a_(std::move(a)), b_(std::move(b)), r_(std::move(r)),
      b_copy_(std::move(b_copy)), r_copy_(std::move(r_copy)) {
  require(!a_.empty(), ErrorCode::InvalidArgument, "tripartite state: A is empty");
  std::set<std::size_t> seen;
  for (const auto* part : {&a_, &b_, &r_})
    for (auto s : *part) {
      require(s < psi_.dims().size(), ErrorCode::InvalidArgument, "tripartite state: bad subsystem");
      require(seen.insert(s).second, ErrorCode::InvalidArgument, "tripartite state: labels overlap");
    }
  require(seen.size() == psi_.dims().size(), ErrorCode::InvalidArgument,
          "tripartite state: labels do not cover every subsystem");
  require(b_copy_.size() <= b_.size() && std::equal(b_copy_.begin(), b_copy_.end(), b_.begin()),
          ErrorCode::InvalidArgument, "tripartite state: B1 must be a prefix of B");
  for (auto s : r_copy_)
    require(std::find(r_.begin(), r_.end(), s) != r_.end(), ErrorCode::InvalidArgument,
            "tripartite state: R1 must lie inside R");
}

std::size_t TripartiteState::dim_a() const { return total_dim(dims_of(psi_, a_)); }

std::size_t TripartiteState::qubits_a() const {
  for (auto s : a_)
    if (psi_.dims()[s] != 2) return 0;
  return a_.size();
}

namespace duality {

Isometry coherent_measurement(const Povm& decoder) {
  const auto d = static_cast<Eigen::Index>(decoder.dim());
  const auto k = static_cast<Eigen::Index>(decoder.size());
  ComplexMatrix u(k * d, d);
  for (Eigen::Index z = 0; z < k; ++z) u.middleRows(z * d, d) = qcore::sqrt_psd(decoder[static_cast<std::size_t>(z)]);
  return Isometry(std::move(u), Dims{decoder.dim()}, Dims{decoder.size(), decoder.dim()});
}

DualityReport verify_theorem1(const TripartiteState& st) {
  DualityReport rep;
  rep.check = "theorem1";
  const CqState zb = entropy::measured_cq(st.psi(), Observable::Z, st.a(), st.b());
  const GuessResult g = entropy::guessing_probability(zb);
  rep.epsilon = std::max(0.0, 1.0 - g.p_guess);
  rep.bound = std::sqrt(2.0 * rep.epsilon);
  rep.achieved = p_secure_x_r(st);
  rep.slack = rep.bound - rep.achieved;
  rep.pass = rep.slack >= -numeric_config().bound_slack;
  double overlap = 0.0;
  for (std::size_t z = 0; z < zb.alphabet(); ++z)
    overlap += zb.probs()[z] * (qcore::sqrt_psd(g.povm[z]) * zb.conditional(z).matrix()).trace().real();
  rep.coherent_overlap = overlap;
  if (overlap < g.p_guess - 1e-8) rep.note = "coherent overlap below p_guess";
  rep.measurement = g.povm;
  return rep;
}

TripartiteState build_case_a_state(const std::vector<double>& qx,
                                   const std::vector<PureStateVector>& theta, const Dims& a_dims,
                                   std::size_t b2_factors) {
  const std::size_t da = total_dim(a_dims);
  require(qx.size() == da && theta.size() == da, ErrorCode::DimensionMismatch,
          "case (a): need one weight and one state per symbol");
  const Dims t_dims = theta.front().dims();
  require(b2_factors < t_dims.size(), ErrorCode::InvalidArgument, "case (a): R must be non-trivial");
  const ComplexMatrix fa = fourier_of(a_dims);
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(da * da * theta.front().dim()));
  for (std::size_t x = 0; x < da; ++x) {
    require(theta[x].dims() == t_dims, ErrorCode::DimensionMismatch, "case (a): theta dims differ");
    require(qx[x] >= 0.0, ErrorCode::InvalidArgument, "case (a): negative weight");
    const ComplexVector col = fa.col(static_cast<Eigen::Index>(x));
    v += std::sqrt(qx[x]) * qcore::kron(qcore::kron(col, col), theta[x].amplitudes());
  }
  Dims dims = a_dims;
  dims.insert(dims.end(), a_dims.begin(), a_dims.end());
  dims.insert(dims.end(), t_dims.begin(), t_dims.end());
  const std::size_t na = a_dims.size();
  return TripartiteState(PureStateVector(std::move(v), dims), range(0, na),
                         range(na, na + b2_factors), range(2 * na + b2_factors, t_dims.size() - b2_factors),
                         range(na, na));
}

TripartiteState build_case_b_state(const std::vector<double>& pz,
                                   const std::vector<PureStateVector>& phi, const Dims& a_dims,
                                   std::size_t b_factors) {
  const std::size_t da = total_dim(a_dims);
  require(pz.size() == da && phi.size() == da, ErrorCode::DimensionMismatch,
          "case (b): need one weight and one state per symbol");
  const Dims p_dims = phi.front().dims();
  require(b_factors <= p_dims.size(), ErrorCode::InvalidArgument, "case (b): bad factor split");
  const Dims b_dims(p_dims.begin(), p_dims.begin() + static_cast<std::ptrdiff_t>(b_factors));
  const Dims r2_dims(p_dims.begin() + static_cast<std::ptrdiff_t>(b_factors), p_dims.end());
  const std::size_t db = total_dim(b_dims), dr2 = total_dim(r2_dims);
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(da * db * da * dr2));
  for (std::size_t z = 0; z < da; ++z) {
    require(phi[z].dims() == p_dims, ErrorCode::DimensionMismatch, "case (b): phi dims differ");
    require(pz[z] >= 0.0, ErrorCode::InvalidArgument, "case (b): negative weight");
    for (std::size_t bi = 0; bi < db; ++bi)
      for (std::size_t ri = 0; ri < dr2; ++ri)
        v(static_cast<Eigen::Index>(((z * db + bi) * da + z) * dr2 + ri)) +=
            std::sqrt(pz[z]) * phi[z].amplitudes()(static_cast<Eigen::Index>(bi * dr2 + ri));
  }
  Dims dims = a_dims;
  dims.insert(dims.end(), b_dims.begin(), b_dims.end());
  dims.insert(dims.end(), a_dims.begin(), a_dims.end());
  dims.insert(dims.end(), r2_dims.begin(), r2_dims.end());
  const std::size_t na = a_dims.size(), nb = b_dims.size(), nr2 = r2_dims.size();
  return TripartiteState(PureStateVector(std::move(v), dims), range(0, na), range(na, nb),
                         range(na + nb, na + nr2), {}, range(na + nb, na));
}

TripartiteState random_tripartite(const Dims& a_dims, const Dims& b_dims, const Dims& r_dims,
                                  std::uint64_t seed) {
  Dims dims = a_dims;
  dims.insert(dims.end(), b_dims.begin(), b_dims.end());
  dims.insert(dims.end(), r_dims.begin(), r_dims.end());
  const std::size_t na = a_dims.size(), nb = b_dims.size(), nr = r_dims.size();
  return TripartiteState(qcore::haar_state(dims, seed), range(0, na), range(na, nb), range(na + nb, nr));
}

TripartiteState random_case_a_state(const Dims& a_dims, const Dims& b2_dims, const Dims& r_dims,
                                    std::uint64_t seed, double spread) {
  const std::size_t da = total_dim(a_dims);
  const auto qx = weights_from(qcore::haar_state({da}, qcore::derive_seed(seed, 0)));
  Dims t_dims = b2_dims;
  t_dims.insert(t_dims.end(), r_dims.begin(), r_dims.end());
  const PureStateVector base = qcore::haar_state(t_dims, qcore::derive_seed(seed, da + 1));
  std::vector<PureStateVector> theta;
  for (std::size_t x = 0; x < da; ++x)
    theta.push_back(perturb(base, qcore::haar_state(t_dims, qcore::derive_seed(seed, x + 1)), spread));
  return build_case_a_state(qx, theta, a_dims, b2_dims.size());
}

TripartiteState random_case_b_state(const Dims& a_dims, const Dims& b_dims, const Dims& r2_dims,
                                    std::uint64_t seed, double spread) {
  const std::size_t da = total_dim(a_dims);
  const auto pz = weights_from(qcore::haar_state({da}, qcore::derive_seed(seed, 0)));
  Dims p_dims = b_dims;
  p_dims.insert(p_dims.end(), r2_dims.begin(), r2_dims.end());
  const std::size_t db = total_dim(b_dims), dp = total_dim(p_dims);
  std::vector<PureStateVector> phi;
  for (std::size_t z = 0; z < da; ++z) {
    ComplexVector e = ComplexVector::Zero(static_cast<Eigen::Index>(dp));
    e(static_cast<Eigen::Index>((z % db) * (dp / db))) = 1.0;
    phi.push_back(perturb(PureStateVector(e, p_dims), qcore::haar_state(p_dims, qcore::derive_seed(seed, z + 1)), spread));
  }
  return build_case_b_state(pz, phi, a_dims, b_dims.size());
}

DualityReport recover_measurement_case_a(const TripartiteState& st) {
  check_case(st, DualityCase::A);
  DualityReport rep;
  rep.check = "theorem2a";
  Povm povm = case_a_povm(st);
  const double pg = protocols::p_guess_with(entropy::measured_cq(st.psi(), Observable::Z, st.a(), st.b()), povm);
  finish_recovery(rep, pg, p_secure_x_r(st));
  rep.measurement = std::move(povm);
  return rep;
}

DualityReport recover_measurement_case_b(const TripartiteState& st) {
  check_case(st, DualityCase::B);
  DualityReport rep;
  rep.check = "theorem2b";
  Povm povm = case_b_povm(st);
  const double pg = protocols::p_guess_with(entropy::measured_cq(st.psi(), Observable::Z, st.a(), st.b()), povm);
  finish_recovery(rep, pg, p_secure_x_r(st));
  rep.measurement = std::move(povm);
  return rep;
}

BinaryMatrix paired_extractor(const BinaryMatrix& f) { return dual_rows(f); }
BinaryMatrix paired_compressor(const BinaryMatrix& g) { return dual_rows(g); }

DualityReport csi_to_pa(const BinaryMatrix& f, const TripartiteState& st, const CsiProtocol& decoder) {
  const std::size_t n = st.qubits_a();
  require(n > 0 && f.cols() == n, ErrorCode::DimensionMismatch, "csi_to_pa: f must act on the qubits of A");
  require(decoder.compressor() == f, ErrorCode::InvalidArgument, "csi_to_pa: decoder built for another f");
  DualityReport rep;
  rep.check = "csi-to-pa";
  const double pg = protocols::evaluate_csi(entropy::measured_cq(st.psi(), Observable::Z, st.a(), st.b()), decoder);
  rep.epsilon = std::max(0.0, 1.0 - pg);
  rep.bound = std::sqrt(2.0 * rep.epsilon);
  const BinaryMatrix gperp = paired_extractor(f);
  const auto key = protocols::run_pa(st.psi(), st.a(), st.r(), PaProtocol(gperp));
  rep.achieved = key.second.achieved;
  rep.slack = rep.bound - rep.achieved;
  rep.pass = rep.slack >= -numeric_config().bound_slack;
  rep.key_length = gperp.rows();
  rep.compressed_length = f.rows();
  return rep;
}

DualityReport csi_to_pa(const BinaryMatrix& f, const TripartiteState& st) {
  const CqState zb = entropy::measured_cq(st.psi(), Observable::Z, st.a(), st.b());
  return csi_to_pa(f, st, protocols::build_csi(zb, f));
}

DualityReport pa_to_csi(const BinaryMatrix& g, const TripartiteState& st, DualityCase which) {
  const std::size_t n = st.qubits_a();
  require(n > 0 && g.cols() == n, ErrorCode::DimensionMismatch, "pa_to_csi: g must act on the qubits of A");
  check_case(st, which);
  const std::size_t l = g.rows();
  const BinaryMatrix fperp = paired_compressor(g);
  const BinaryMatrix gfull = binlin::dual_basis(binlin::stack(g, binlin::complete_basis(g)));
  const auto map = stabilizer::linear_relabel(gfull);
  std::vector<std::size_t> inv(map.size());
  for (std::size_t z = 0; z < map.size(); ++z) inv[map[z]] = z;

  DualityReport rep;
  rep.check = "pa-to-csi";
  rep.key_length = l;
  rep.compressed_length = n - l;
  const double eps = protocols::run_pa(st.psi(), st.a(), st.r(), PaProtocol(g)).second.achieved;

  // Canonical layout with A first, then the register that copies A.
  const Subsystems& a = st.a();
  Subsystems order, copy_reg;
  std::size_t nb = st.b().size();
  if (which == DualityCase::A) {
    order = concat({&a, &st.b(), &st.r()});
    copy_reg = range(n, n);
  } else {
    order = concat({&a, &st.b(), &st.r()});
    for (auto s : st.r_copy())
      copy_reg.push_back(n + nb + static_cast<std::size_t>(std::find(st.r().begin(), st.r().end(), s) - st.r().begin()));
  }
  PureStateVector pc = qcore::permute(st.psi(), order);
  pc = stabilizer::relabel_register(pc, range(0, n), gfull);
  pc = stabilizer::relabel_register(pc, copy_reg, gfull);

  const std::size_t total = std::size_t{1} << n;
  const std::size_t hat = std::size_t{1} << (n - l);
  const std::size_t bar = std::size_t{1} << l;
  const Dims b_dims = dims_of(st.psi(), st.b());
  const auto db = static_cast<Eigen::Index>(total_dim(b_dims));

  // Relabelling of B1 in case (a), to pull the decoder back to the original B.
  ComplexMatrix q = ComplexMatrix::Identity(db, db);
  if (which == DualityCase::A) {
    ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    for (std::size_t z = 0; z < total; ++z) p(static_cast<Eigen::Index>(map[z]), static_cast<Eigen::Index>(z)) = 1.0;
    q = qcore::kron(p, ComplexMatrix::Identity(db / static_cast<Eigen::Index>(total), db / static_cast<Eigen::Index>(total)));
  }

  const ComplexMatrix split = qcore::split_amplitudes(pc, range(l, n - l));
  Dims rest_dims;
  for (auto s : qcore::complement(range(l, n - l), pc.dims().size())) rest_dims.push_back(pc.dims()[s]);

  std::vector<std::vector<ComplexMatrix>> decoders(hat, std::vector<ComplexMatrix>(total, ComplexMatrix::Zero(db, db)));
  for (std::size_t zh = 0; zh < hat; ++zh) {
    auto& dec = decoders[zh];
    const ComplexVector row = split.row(static_cast<Eigen::Index>(zh)).transpose();
    if (l == 0 || row.squaredNorm() < 1e-14) {
      dec[inv[zh]] = ComplexMatrix::Identity(db, db);
      continue;
    }
    const PureStateVector sub = PureStateVector::normalized(row, rest_dims);
    // Sub-state layout: Abar (l), B (nb), R.
    const std::size_t nr = sub.dims().size() - l - nb;
    Povm povm = [&] {
      if (which == DualityCase::A) {
        TripartiteState s(sub, range(0, l), range(l, nb), range(l + nb, nr), range(l, l));
        return case_a_povm(s);
      }
      Subsystems rc;
      for (std::size_t k = 0; k < l; ++k) rc.push_back(copy_reg[k] - (n - l));
      TripartiteState s(sub, range(0, l), range(l, nb), range(l + nb, nr), {}, rc);
      return case_b_povm(s);
    }();
    for (std::size_t zb = 0; zb < bar; ++zb) dec[inv[zb * hat + zh]] = q.adjoint() * povm[zb] * q;
  }
  std::vector<Povm> povms;
  for (auto& d : decoders) povms.emplace_back(std::move(d));
  const CsiProtocol proto(fperp, std::move(povms));
  const double pg = protocols::evaluate_csi(entropy::measured_cq(st.psi(), Observable::Z, st.a(), st.b()), proto);
  finish_recovery(rep, pg, eps);
  return rep;
}

UncertaintyResult check_uncertainty(const TripartiteState& st) {
  UncertaintyResult u;
  u.h_x_r = entropy::measured_cond_entropy(st.psi(), Observable::X, st.a(), st.r());
  u.h_z_b = entropy::measured_cond_entropy(st.psi(), Observable::Z, st.a(), st.b());
  u.bound = std::log2(static_cast<double>(st.dim_a()));
  u.slack = u.h_x_r + u.h_z_b - u.bound;
  u.pass = u.slack >= -numeric_config().bound_slack;
  return u;
}

UncertaintyResult check_smooth_uncertainty(const TripartiteState& st, double delta) {
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  const std::size_t d = st.dim_a();
  require((d & (d - 1)) == 0, ErrorCode::InvalidArgument, "smooth uncertainty needs d a power of two");
  UncertaintyResult u;
  const SmoothingBall ball(delta);
  u.h_x_r = entropy::smooth_min_entropy(entropy::measured_cq(st.psi(), Observable::X, st.a(), st.r()), ball);
  u.h_z_b = entropy::smooth_max_entropy(entropy::measured_cq(st.psi(), Observable::Z, st.a(), st.b()), ball);
  u.bound = std::log2(static_cast<double>(d)) - 8.0 * std::log2(1.0 / delta) - 12.0;
  u.slack = u.h_x_r + u.h_z_b - u.bound;
  u.pass = u.slack >= -numeric_config().bound_slack;
  u.vacuous = u.bound < 0.0;
  return u;
}

TripartiteState ghz_fixture() {
  ComplexVector v = ComplexVector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  return TripartiteState(PureStateVector(v, {2, 2, 2}), {0}, {1}, {2});
}

TripartiteState phase_fixture() {
  ComplexVector a(2);
  a << 1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0));
  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  return TripartiteState(PureStateVector(qcore::kron(a, bell), {2, 2, 2}), {0}, {1}, {2});
}

TripartiteState max_entangled_fixture(std::size_t d) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t k = 0; k < d; ++k) v(static_cast<Eigen::Index>(k * d + k)) = 1.0 / std::sqrt(static_cast<double>(d));
  return TripartiteState(PureStateVector(v, {d, d, 1}), {0}, {1}, {2});
}

}  // namespace duality
}  // namespace dlab
