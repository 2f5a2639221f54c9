#include "dlab/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "dlab/config.hpp"
#include "dlab/error.hpp"

namespace dlab {

namespace {

NumericConfig& mutable_config() {
  static NumericConfig cfg;
  return cfg;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void check_dims(std::size_t n, const Dims& dims, const char* what) {
  require(!dims.empty(), ErrorCode::InvalidState, std::string(what) + ": empty dimension list");
  for (auto d : dims) require(d >= 1, ErrorCode::InvalidState, std::string(what) + ": zero dimension");
  require(total_dim(dims) == n, ErrorCode::DimensionMismatch,
          std::string(what) + ": dimension list does not match size");
}

void check_finite(const ComplexMatrix& m, const char* what) {
  require(m.allFinite(), ErrorCode::InvalidState, std::string(what) + ": non-finite entry");
}

std::vector<std::size_t> strides_of(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

void check_subsystems(const Subsystems& subs, std::size_t count) {
  std::vector<bool> seen(count, false);
  for (auto s : subs) {
    require(s < count, ErrorCode::InvalidArgument, "subsystem index out of range");
    require(!seen[s], ErrorCode::InvalidArgument, "repeated subsystem index");
    seen[s] = true;
  }
}

// index_table[k][t] = full index for kept multi-index k and traced multi-index t.
struct SplitIndex {
  std::size_t kept_dim = 1;
  std::size_t rest_dim = 1;
  std::vector<std::size_t> table;  // kept_dim * rest_dim, row-major in (k, t)
};

SplitIndex split_index(const Dims& dims, const Subsystems& rows) {
  check_subsystems(rows, dims.size());
  const Subsystems rest = qcore::complement(rows, dims.size());
  const auto strides = strides_of(dims);
  SplitIndex out;
  for (auto s : rows) out.kept_dim *= dims[s];
  for (auto s : rest) out.rest_dim *= dims[s];
  out.table.resize(out.kept_dim * out.rest_dim);

  auto offsets = [&](const Subsystems& subs, std::size_t count) {
    std::vector<std::size_t> off(count, 0);
    std::vector<std::size_t> digit(subs.size(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t o = 0;
      for (std::size_t k = 0; k < subs.size(); ++k) o += digit[k] * strides[subs[k]];
      off[i] = o;
      for (std::size_t k = subs.size(); k-- > 0;) {
        if (++digit[k] < dims[subs[k]]) break;
        digit[k] = 0;
      }
    }
    return off;
  };
  const auto row_off = offsets(rows, out.kept_dim);
  const auto col_off = offsets(rest, out.rest_dim);
  for (std::size_t k = 0; k < out.kept_dim; ++k)
    for (std::size_t t = 0; t < out.rest_dim; ++t)
      out.table[k * out.rest_dim + t] = row_off[k] + col_off[t];
  return out;
}

Dims select_dims(const Dims& dims, const Subsystems& subs) {
  Dims out;
  out.reserve(subs.size());
  for (auto s : subs) out.push_back(dims[s]);
  return out;
}

}  // namespace

const NumericConfig& numeric_config() { return mutable_config(); }
void set_numeric_config(const NumericConfig& cfg) { mutable_config() = cfg; }

std::size_t total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// ---- PureStateVector --------------------------------------------------------

PureStateVector::PureStateVector(ComplexVector amplitudes, Dims dims)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  check_dims(dim(), dims_, "pure state");
  check_finite(amplitudes_, "pure state");
  require(std::abs(amplitudes_.norm() - 1.0) <= numeric_config().norm_tol, ErrorCode::InvalidState,
          "pure state is not normalised");
}

PureStateVector PureStateVector::normalized(ComplexVector amplitudes, Dims dims) {
  const double n = amplitudes.norm();
  require(n > 0.0, ErrorCode::InvalidState, "cannot normalise a zero vector");
  amplitudes /= n;
  return PureStateVector(std::move(amplitudes), std::move(dims));
}

PureStateVector PureStateVector::basis_state(const Dims& dims, std::size_t index) {
  const std::size_t n = total_dim(dims);
  require(index < n, ErrorCode::InvalidArgument, "basis index out of range");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(n));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureStateVector(std::move(v), dims);
}

// ---- DensityOperator ----------------------------------------------------------

DensityOperator::DensityOperator(ComplexMatrix matrix, Dims dims)
    : DensityOperator(std::move(matrix), std::move(dims), true) {}

DensityOperator::DensityOperator(ComplexMatrix matrix, Dims dims, bool normalized)
    : matrix_(std::move(matrix)), dims_(std::move(dims)), normalized_(normalized) {
  const auto& cfg = numeric_config();
  require(matrix_.rows() == matrix_.cols(), ErrorCode::InvalidState, "density operator must be square");
  check_dims(dim(), dims_, "density operator");
  check_finite(matrix_, "density operator");
  require(max_abs(matrix_ - matrix_.adjoint()) <= cfg.hermitian_tol, ErrorCode::InvalidState,
          "density operator is not Hermitian");
  matrix_ = qcore::hermitian_part(matrix_);
  const double tr = matrix_.trace().real();
  if (normalized_) {
    require(std::abs(tr - 1.0) <= cfg.trace_tol, ErrorCode::InvalidState, "density operator trace != 1");
  } else {
    require(tr <= 1.0 + cfg.trace_tol, ErrorCode::InvalidState, "subnormalised operator has trace > 1");
  }
  const double lmin = qcore::eigh(matrix_).values.minCoeff();
  require(lmin >= -cfg.eigen_clamp, ErrorCode::InvalidState, "density operator is not positive semidefinite");
}

DensityOperator DensityOperator::subnormalized(ComplexMatrix matrix, Dims dims) {
  return DensityOperator(std::move(matrix), std::move(dims), false);
}

DensityOperator DensityOperator::from_pure(const PureStateVector& psi) {
  const auto& v = psi.amplitudes();
  return DensityOperator(v * v.adjoint(), psi.dims());
}

DensityOperator DensityOperator::maximally_mixed(const Dims& dims) {
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  return DensityOperator(ComplexMatrix::Identity(n, n) / static_cast<double>(n), dims);
}

// ---- Isometry -------------------------------------------------------------------

Isometry::Isometry(ComplexMatrix matrix, Dims in_dims, Dims out_dims)
    : matrix_(std::move(matrix)), in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)) {
  require(matrix_.rows() >= matrix_.cols(), ErrorCode::InvalidState, "isometry needs rows >= cols");
  check_dims(static_cast<std::size_t>(matrix_.cols()), in_dims_, "isometry input");
  check_dims(static_cast<std::size_t>(matrix_.rows()), out_dims_, "isometry output");
  check_finite(matrix_, "isometry");
  const auto n = matrix_.cols();
  require(max_abs(matrix_.adjoint() * matrix_ - ComplexMatrix::Identity(n, n)) <= numeric_config().isometry_tol,
          ErrorCode::InvalidState, "matrix is not an isometry");
}

// ---- Povm -----------------------------------------------------------------------

Povm::Povm(std::vector<ComplexMatrix> elements) : elements_(std::move(elements)) {
  const auto& cfg = numeric_config();
  require(!elements_.empty(), ErrorCode::InvalidState, "POVM needs at least one element");
  const auto n = elements_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (auto& e : elements_) {
    require(e.rows() == n && e.cols() == n, ErrorCode::InvalidState, "POVM elements differ in size");
    check_finite(e, "POVM element");
    require(max_abs(e - e.adjoint()) <= cfg.hermitian_tol * std::max<double>(1.0, static_cast<double>(n)),
            ErrorCode::InvalidState, "POVM element is not Hermitian");
    e = qcore::hermitian_part(e);
    require(qcore::eigh(e).values.minCoeff() >= -cfg.eigen_clamp, ErrorCode::InvalidState,
            "POVM element is not positive semidefinite");
    sum += e;
  }
  require(max_abs(sum - ComplexMatrix::Identity(n, n)) <= cfg.povm_tol, ErrorCode::InvalidState,
          "POVM elements do not sum to the identity");
}

std::size_t Povm::dim() const { return static_cast<std::size_t>(elements_.front().rows()); }

// ---- CqState --------------------------------------------------------------------

CqState::CqState(std::vector<double> probs, std::vector<DensityOperator> conditionals)
    : probs_(std::move(probs)), conditionals_(std::move(conditionals)) {
  require(!probs_.empty(), ErrorCode::InvalidState, "cq state needs a non-empty alphabet");
  require(probs_.size() == conditionals_.size(), ErrorCode::DimensionMismatch,
          "cq state: one conditional per symbol required");
  double total = 0.0;
  for (double p : probs_) {
    require(std::isfinite(p) && p >= -numeric_config().prob_tol, ErrorCode::InvalidState,
            "cq state: negative probability");
    total += p;
  }
  require(std::abs(total - 1.0) <= numeric_config().prob_tol, ErrorCode::InvalidState,
          "cq state: probabilities do not sum to one");
  for (auto& p : probs_) p = std::max(p, 0.0);
  for (const auto& c : conditionals_) {
    require(c.dims() == conditionals_.front().dims(), ErrorCode::DimensionMismatch,
            "cq state: conditionals differ in dimension");
    require(c.is_normalized(), ErrorCode::InvalidState, "cq state: conditional not normalised");
  }
}

DensityOperator CqState::density() const {
  const auto d = static_cast<Eigen::Index>(alphabet());
  const auto s = static_cast<Eigen::Index>(side_dim());
  ComplexMatrix m = ComplexMatrix::Zero(d * s, d * s);
  for (Eigen::Index z = 0; z < d; ++z)
    m.block(z * s, z * s, s, s) = probs_[static_cast<std::size_t>(z)] * conditionals_[static_cast<std::size_t>(z)].matrix();
  Dims dims{alphabet()};
  dims.insert(dims.end(), side_dims().begin(), side_dims().end());
  return DensityOperator(std::move(m), std::move(dims));
}

DensityOperator CqState::side_state() const {
  const auto s = static_cast<Eigen::Index>(side_dim());
  ComplexMatrix m = ComplexMatrix::Zero(s, s);
  for (std::size_t z = 0; z < alphabet(); ++z) m += probs_[z] * conditionals_[z].matrix();
  return DensityOperator(std::move(m), side_dims());
}

CqState CqState::trace_side(const Subsystems& keep) const {
  std::vector<DensityOperator> conds;
  conds.reserve(alphabet());
  for (const auto& c : conditionals_) conds.push_back(qcore::partial_trace(c, keep));
  return CqState(probs_, std::move(conds));
}

namespace qcore {

// ---- dense helpers ----------------------------------------------------------------

HermitianEigen eigh(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  require(es.info() == Eigen::Success, ErrorCode::SolverFailure, "Hermitian eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix sqrt_psd(const ComplexMatrix& h) {
  auto e = eigh(hermitian_part(h));
  RealVector s = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

double trace_norm_hermitian(const ComplexMatrix& h) {
  return eigh(hermitian_part(h)).values.cwiseAbs().sum();
}

double fidelity_psd(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
          "fidelity: dimension mismatch");
  // ||sqrt(a) sqrt(b)||_1; singular values keep small terms accurate for rank-deficient inputs.
  const ComplexMatrix m = sqrt_psd(a) * sqrt_psd(b);
  return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues().sum();
}

// ---- tensor structure ------------------------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityOperator kron(const DensityOperator& a, const DensityOperator& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityOperator(kron(a.matrix(), b.matrix()), std::move(dims));
}

PureStateVector kron(const PureStateVector& a, const PureStateVector& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  ComplexVector v = kron(ComplexMatrix(a.amplitudes()), ComplexMatrix(b.amplitudes()));
  return PureStateVector(std::move(v), std::move(dims));
}

Subsystems complement(const Subsystems& subsystems, std::size_t count) {
  std::vector<bool> in(count, false);
  for (auto s : subsystems) {
    require(s < count, ErrorCode::InvalidArgument, "subsystem index out of range");
    in[s] = true;
  }
  Subsystems out;
  for (std::size_t s = 0; s < count; ++s)
    if (!in[s]) out.push_back(s);
  return out;
}

ComplexMatrix split_amplitudes(const PureStateVector& psi, const Subsystems& rows) {
  const auto idx = split_index(psi.dims(), rows);
  ComplexMatrix m(static_cast<Eigen::Index>(idx.kept_dim), static_cast<Eigen::Index>(idx.rest_dim));
  for (std::size_t k = 0; k < idx.kept_dim; ++k)
    for (std::size_t t = 0; t < idx.rest_dim; ++t)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
          psi.amplitudes()(static_cast<Eigen::Index>(idx.table[k * idx.rest_dim + t]));
  return m;
}

PureStateVector permute(const PureStateVector& psi, const Subsystems& order) {
  require(order.size() == psi.dims().size(), ErrorCode::InvalidArgument, "permute: not a permutation");
  const ComplexMatrix m = split_amplitudes(psi, order);  // rest is empty
  return PureStateVector(ComplexVector(Eigen::Map<const ComplexVector>(m.data(), m.size())),
                         select_dims(psi.dims(), order));
}

DensityOperator permute(const DensityOperator& rho, const Subsystems& order) {
  require(order.size() == rho.dims().size(), ErrorCode::InvalidArgument, "permute: not a permutation");
  const auto idx = split_index(rho.dims(), order);
  const auto n = static_cast<Eigen::Index>(idx.kept_dim);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = rho.matrix()(static_cast<Eigen::Index>(idx.table[static_cast<std::size_t>(i)]),
                             static_cast<Eigen::Index>(idx.table[static_cast<std::size_t>(j)]));
  if (rho.is_normalized()) return DensityOperator(std::move(m), select_dims(rho.dims(), order));
  return DensityOperator::subnormalized(std::move(m), select_dims(rho.dims(), order));
}

DensityOperator partial_trace(const DensityOperator& rho, const Subsystems& keep) {
  require(!keep.empty(), ErrorCode::InvalidArgument, "partial_trace: nothing kept");
  const auto idx = split_index(rho.dims(), keep);
  const auto k = static_cast<Eigen::Index>(idx.kept_dim);
  ComplexMatrix m = ComplexMatrix::Zero(k, k);
  for (std::size_t a = 0; a < idx.kept_dim; ++a)
    for (std::size_t b = 0; b < idx.kept_dim; ++b) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < idx.rest_dim; ++t)
        acc += rho.matrix()(static_cast<Eigen::Index>(idx.table[a * idx.rest_dim + t]),
                            static_cast<Eigen::Index>(idx.table[b * idx.rest_dim + t]));
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  if (rho.is_normalized()) return DensityOperator(std::move(m), select_dims(rho.dims(), keep));
  return DensityOperator::subnormalized(std::move(m), select_dims(rho.dims(), keep));
}

DensityOperator partial_trace(const PureStateVector& psi, const Subsystems& keep) {
  require(!keep.empty(), ErrorCode::InvalidArgument, "partial_trace: nothing kept");
  const ComplexMatrix m = split_amplitudes(psi, keep);
  return DensityOperator(m * m.adjoint(), select_dims(psi.dims(), keep));
}

ComplexVector apply_on(const PureStateVector& psi, const ComplexMatrix& op, const Subsystems& targets) {
  const ComplexMatrix m = split_amplitudes(psi, targets);
  require(op.cols() == m.rows(), ErrorCode::DimensionMismatch, "apply_on: operator does not match targets");
  const ComplexMatrix out = op * m;
  // Row-major flattening of (out-space, rest).
  ComplexVector v(out.size());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) v(i * out.cols() + j) = out(i, j);
  return v;
}

// ---- state functionals -------------------------------------------------------------------

PureStateVector purify(const DensityOperator& rho) {
  const auto e = eigh(rho.matrix());
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = e.values.size(); k-- > 0;)
    if (e.values(k) > 1e-13) support.push_back(k);
  const auto r = static_cast<Eigen::Index>(support.size());
  require(r > 0, ErrorCode::InvalidState, "purify: zero operator");
  const auto n = static_cast<Eigen::Index>(rho.dim());
  ComplexVector v = ComplexVector::Zero(n * r);
  double norm2 = 0.0;
  for (Eigen::Index a = 0; a < r; ++a) norm2 += e.values(support[static_cast<std::size_t>(a)]);
  for (Eigen::Index a = 0; a < r; ++a) {
    const Eigen::Index k = support[static_cast<std::size_t>(a)];
    const double w = std::sqrt(e.values(k) / norm2);
    for (Eigen::Index i = 0; i < n; ++i) v(i * r + a) = w * e.vectors(i, k);
  }
  Dims dims = rho.dims();
  dims.push_back(static_cast<std::size_t>(r));
  return PureStateVector::normalized(std::move(v), std::move(dims));
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  require(rho.dim() == sigma.dim(), ErrorCode::DimensionMismatch, "fidelity: dimension mismatch");
  return std::min(1.0, fidelity_psd(rho.matrix(), sigma.matrix()));
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  require(rho.dim() == sigma.dim(), ErrorCode::DimensionMismatch, "trace distance: dimension mismatch");
  return std::min(1.0, 0.5 * trace_norm_hermitian(rho.matrix() - sigma.matrix()));
}

UhlmannMap uhlmann_isometry(const PureStateVector& psi, const Subsystems& psi_shared,
                            const PureStateVector& phi, const Subsystems& phi_shared) {
  require(select_dims(psi.dims(), psi_shared) == select_dims(phi.dims(), phi_shared),
          ErrorCode::DimensionMismatch, "uhlmann: shared subsystems differ in dimension");
  const Subsystems psi_rest = complement(psi_shared, psi.dims().size());
  const Subsystems phi_rest = complement(phi_shared, phi.dims().size());
  const ComplexMatrix a = split_amplitudes(psi, psi_shared);  // shared x p
  const ComplexMatrix b = split_amplitudes(phi, phi_shared);  // shared x q
  const bool acts_on_phi = b.cols() <= a.cols();
  // Overlap <big|(1 (x) W)|small> = tr(W^T O) with O = Big^dagger Small.
  const ComplexMatrix& big = acts_on_phi ? a : b;
  const ComplexMatrix& small = acts_on_phi ? b : a;
  const ComplexMatrix o = big.adjoint() * small;
  Eigen::JacobiSVD<ComplexMatrix> svd(o, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix& u = svd.matrixU();
  const ComplexMatrix& v = svd.matrixV();
  const Eigen::Index q = small.cols();
  ComplexMatrix w = u.leftCols(q).conjugate() * v.transpose();
  const double overlap = svd.singularValues().sum();
  Dims in_dims = acts_on_phi ? select_dims(phi.dims(), phi_rest) : select_dims(psi.dims(), psi_rest);
  Dims out_dims = acts_on_phi ? select_dims(psi.dims(), psi_rest) : select_dims(phi.dims(), phi_rest);
  if (in_dims.empty()) in_dims = {1};
  if (out_dims.empty()) out_dims = {1};
  return {Isometry(std::move(w), std::move(in_dims), std::move(out_dims)), acts_on_phi, overlap};
}

// ---- randomness --------------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PureStateVector haar_state(const Dims& dims, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  require(n >= 1, ErrorCode::InvalidArgument, "haar_state: empty space");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = Complex(re, im);
  }
  if (n == 1) v(0) = 1.0;
  return PureStateVector::normalized(std::move(v), dims);
}

DensityOperator random_density(const Dims& dims, std::size_t ancilla, std::uint64_t seed) {
  Dims full = dims;
  full.push_back(ancilla);
  Subsystems keep(dims.size());
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  return partial_trace(haar_state(full, seed), keep);
}

ComplexMatrix haar_unitary(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const auto m = static_cast<Eigen::Index>(n);
  ComplexMatrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

// ---- measurements -------------------------------------------------------------------------

ComplexMatrix fourier_matrix(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index z = 0; z < n; ++z)
    for (Eigen::Index x = 0; x < n; ++x) {
      const auto k = static_cast<double>((x * z) % n);
      f(z, x) = scale * std::polar(1.0, -2.0 * std::numbers::pi * k / static_cast<double>(d));
    }
  return f;
}

CqState measure_basis(const PureStateVector& psi, Basis basis, std::size_t target) {
  return measure_basis(psi, basis, Subsystems{target});
}

CqState measure_basis(const PureStateVector& psi, Basis basis, const Subsystems& targets) {
  require(!targets.empty(), ErrorCode::InvalidArgument, "measure_basis: no target");
  check_subsystems(targets, psi.dims().size());
  ComplexMatrix m = split_amplitudes(psi, targets);
  if (basis == Basis::Fourier) {
    ComplexMatrix u = ComplexMatrix::Identity(1, 1);
    for (auto t : targets) u = kron(u, fourier_matrix(psi.dims()[t]).adjoint());
    m = u * m;
  }
  Subsystems rest = complement(targets, psi.dims().size());
  Dims side = select_dims(psi.dims(), rest);
  if (side.empty()) side = {1};
  std::vector<double> probs;
  std::vector<DensityOperator> conds;
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    const ComplexVector v = m.row(x).transpose();
    const double p = v.squaredNorm();
    probs.push_back(p);
    if (p > 1e-300) {
      const ComplexVector u = v / std::sqrt(p);
      conds.emplace_back(u * u.adjoint(), side);
    } else {
      conds.push_back(DensityOperator::maximally_mixed(side));
    }
  }
  // Absorb rounding so the probability vector sums to one exactly enough.
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (auto& p : probs) p /= total;
  return CqState(std::move(probs), std::move(conds));
}

}  // namespace qcore
}  // namespace dlab
