#include <gtest/gtest.h>

#include <cmath>

#include "dlab/entropy.hpp"
#include "dlab/error.hpp"
#include "dlab/harness.hpp"
#include "dlab/protocols.hpp"

using namespace dlab;

namespace {

DensityOperator pure_qubit(double angle) {
  ComplexVector v(2);
  v << std::cos(angle), std::sin(angle);
  return DensityOperator::from_pure(PureStateVector(v, {2}));
}

CqState orthogonal_cq(std::size_t n) {
  const std::size_t d = std::size_t{1} << n;
  std::vector<DensityOperator> c;
  for (std::size_t z = 0; z < d; ++z) c.push_back(DensityOperator::from_pure(PureStateVector::basis_state({d}, z)));
  return CqState(std::vector<double>(d, 1.0 / static_cast<double>(d)), std::move(c));
}

// 1/2 || rho_KS - 1/d (x) rho_S ||_1 from the explicit block-diagonal operators.
double assembled_p_secure(const CqState& cq) {
  const auto s = static_cast<Eigen::Index>(cq.side_dim());
  const auto d = static_cast<Eigen::Index>(cq.alphabet());
  ComplexMatrix real = ComplexMatrix::Zero(d * s, d * s), ideal = real;
  ComplexMatrix side = ComplexMatrix::Zero(s, s);
  for (Eigen::Index z = 0; z < d; ++z) side += cq.probs()[z] * cq.conditional(z).matrix();
  for (Eigen::Index z = 0; z < d; ++z) {
    real.block(z * s, z * s, s, s) = cq.probs()[z] * cq.conditional(z).matrix();
    ideal.block(z * s, z * s, s, s) = side / static_cast<double>(d);
  }
  return 0.5 * qcore::trace_norm_hermitian(real - ideal);
}

// PGM success computed with Eigen's own eigensolver, one coset at a time.
double assembled_csi(const CqState& cq, const BinaryMatrix& f) {
  const auto s = static_cast<Eigen::Index>(cq.side_dim());
  double total = 0;
  for (std::uint64_t c = 0; c < (1u << f.rows()); ++c) {
    ComplexMatrix sum = ComplexMatrix::Zero(s, s);
    std::vector<std::size_t> members;
    for (std::size_t z = 0; z < cq.alphabet(); ++z)
      if (binlin::apply_hash(f, z) == c) {
        members.push_back(z);
        sum += cq.probs()[z] * cq.conditional(z).matrix();
      }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sum);
    RealVector inv = es.eigenvalues();
    for (Eigen::Index k = 0; k < inv.size(); ++k) inv(k) = inv(k) > 1e-12 ? 1 / std::sqrt(inv(k)) : 0.0;
    const ComplexMatrix root = es.eigenvectors() * inv.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    for (auto z : members) {
      const ComplexMatrix w = cq.probs()[z] * cq.conditional(z).matrix();
      total += (root * w * root * w).trace().real();
    }
  }
  return total;
}

}  // namespace

TEST(PSecure, IdealAndDeterministicKeys) {
  const auto mix = DensityOperator::maximally_mixed({2});
  EXPECT_NEAR(protocols::p_secure(CqState({0.5, 0.5}, {mix, mix})), 0.0, 1e-14);
  EXPECT_NEAR(protocols::p_secure(CqState({1.0, 0.0}, {mix, mix})), 0.5, 1e-14);
}

TEST(PSecure, MatchesAssembledTraceDistance) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto psi = qcore::haar_state({4, 3}, s);
    const auto cq = qcore::measure_basis(psi, qcore::Basis::Fourier, 0);
    EXPECT_NEAR(protocols::p_secure(cq), assembled_p_secure(cq), 1e-12);
  }
}

TEST(PGuessWith, TrivialDecoders) {
  const auto cq = orthogonal_cq(2);
  std::vector<ComplexMatrix> proj;
  for (std::size_t z = 0; z < 4; ++z) proj.push_back(cq.conditional(z).matrix());
  EXPECT_NEAR(protocols::p_guess_with(cq, Povm(proj)), 1.0, 1e-14);
  std::vector<ComplexMatrix> always0(4, ComplexMatrix::Zero(4, 4));
  always0[0] = ComplexMatrix::Identity(4, 4);
  EXPECT_NEAR(protocols::p_guess_with(cq, Povm(always0)), 0.25, 1e-14);
}

TEST(PGuessWith, OptimalDecoderReproducesSdp) {
  const CqState cq({0.2, 0.5, 0.3}, {pure_qubit(0.1), pure_qubit(1.0), pure_qubit(2.2)});
  const auto g = entropy::guessing_probability(cq);
  EXPECT_NEAR(protocols::p_guess_with(cq, g.povm), g.p_guess, 1e-8);
}

TEST(Pgm, OrthogonalAndSingleSymbol) {
  const auto cq = orthogonal_cq(2);
  EXPECT_NEAR(protocols::p_guess_with(cq, protocols::pgm(cq)), 1.0, 1e-12);
  const CqState one({1.0}, {pure_qubit(0.3)});
  const auto p = protocols::pgm(one);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_LT((p[0] - ComplexMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(Pgm, HelstromSandwich) {
  for (double a : {0.2, 0.7, 1.2}) {
    const CqState cq({0.5, 0.5}, {pure_qubit(0), pure_qubit(a)});
    const double c = std::cos(a);
    const double opt = 0.5 * (1 + std::sqrt(1 - c * c));
    const double pg = protocols::p_guess_with(cq, protocols::pgm(cq));
    EXPECT_LE(pg, opt + 1e-12);
    EXPECT_GE(pg, opt * opt - 1e-12);
    // For two equiprobable pure states the PGM is optimal.
    EXPECT_NEAR(pg, opt, 1e-10);
  }
}

TEST(Pgm, AlwaysValidPovm) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto psi = qcore::haar_state({5, 2, 2}, s);
    const auto cq = qcore::measure_basis(psi, qcore::Basis::Computational, 0).trace_side({0});
    EXPECT_NO_THROW(protocols::pgm(cq));
  }
}

TEST(RunPa, GhzAndEmptyKey) {
  ComplexVector v = ComplexVector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  const PureStateVector ghz(v, {2, 2, 2});
  EXPECT_NEAR(protocols::run_pa(ghz, {0}, {2}, PaProtocol(BinaryMatrix::identity(1))).second.achieved, 0.0, 1e-12);
  const auto psi = qcore::haar_state({2, 2, 2, 2}, 3);
  EXPECT_NEAR(protocols::run_pa(psi, {0, 1}, {3}, PaProtocol(BinaryMatrix(0, 2))).second.achieved, 0.0, 1e-12);
}

TEST(RunPa, MatchesEnumerationOracle) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto psi = qcore::haar_state({2, 2, 2, 2, 2}, s);  // A = 0..2, B = 3, R = 4
    const auto g = binlin::sample_full_rank(1, 3, s);
    const double got = protocols::run_pa(psi, {0, 1, 2}, {4}, PaProtocol(g)).second.achieved;

    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    const ComplexMatrix h3 = qcore::kron(qcore::kron(h, h), h);
    const ComplexVector rotated = qcore::kron(h3, ComplexMatrix::Identity(4, 4)) * psi.amplitudes();
    std::vector<ComplexMatrix> block(2, ComplexMatrix::Zero(2, 2));
    for (std::uint64_t x = 0; x < 8; ++x) {
      ComplexMatrix w(2, 2);  // rows B, columns R
      for (int b = 0; b < 2; ++b)
        for (int r = 0; r < 2; ++r) w(b, r) = rotated(static_cast<Eigen::Index>(x * 4 + b * 2 + r));
      block[binlin::apply_hash(g, x)] += w.transpose() * w.conjugate();
    }
    const ComplexMatrix side = block[0] + block[1];
    double expect = 0;
    for (const auto& b : block) expect += 0.5 * qcore::trace_norm_hermitian(b - side / 2.0);
    EXPECT_NEAR(got, expect, 1e-10);
  }
}

TEST(RunPa, ShorterKeyIsNoLessSecure) {
  const auto psi = qcore::haar_state({2, 2, 2, 2, 2}, 77);
  const auto g = binlin::sample_full_rank(3, 3, 5);
  double prev = protocols::run_pa(psi, {0, 1, 2}, {3, 4}, PaProtocol(g)).second.achieved;
  for (std::size_t len = 2; len-- > 0;) {
    const BinaryMatrix shorter = len ? g.slice_rows(0, len) : BinaryMatrix(0, 3);
    const double cur = protocols::run_pa(psi, {0, 1, 2}, {3, 4}, PaProtocol(shorter)).second.achieved;
    EXPECT_LE(cur, prev + 1e-12);
    prev = cur;
  }
}

TEST(RunCsi, TrivialCases) {
  const auto src = harness::iid_qubit_source(3, 0.4);
  EXPECT_NEAR(protocols::run_csi(src, BinaryMatrix::identity(3)).second.achieved, 1.0, 1e-12);
  EXPECT_NEAR(protocols::run_csi(orthogonal_cq(3), BinaryMatrix(0, 3)).second.achieved, 1.0, 1e-12);
}

TEST(RunCsi, MatchesAssemblyOracle) {
  const auto src = harness::iid_qubit_source(3, M_PI / 8);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = binlin::sample_full_rank(2, 3, s);
    EXPECT_NEAR(protocols::run_csi(src, f).second.achieved, assembled_csi(src, f), 1e-8);
  }
}

TEST(RunCsi, NestedCompressorsMonotone) {
  const auto src = harness::iid_qubit_source(4, 0.5);
  const auto full = binlin::sample_full_rank(4, 4, 12);
  double prev = 0;
  for (std::size_t l = 0; l <= 4; ++l) {
    const BinaryMatrix f = l ? full.slice_rows(0, l) : BinaryMatrix(0, 4);
    const double pg = protocols::run_csi(src, f).second.achieved;
    EXPECT_GE(pg, prev - 1e-12);
    prev = pg;
  }
}

TEST(RunCsi, PureStateRoute) {
  ComplexVector v = ComplexVector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  const PureStateVector ghz(v, {2, 2, 2});
  EXPECT_NEAR(protocols::run_csi(ghz, {0}, {1}, BinaryMatrix(0, 1)).second.achieved, 1.0, 1e-12);
}

TEST(ProtocolValidation, RankAndShape) {
  EXPECT_THROW(PaProtocol(BinaryMatrix::from_rows({"11", "11"})), Error);
  EXPECT_THROW(protocols::run_csi(harness::iid_qubit_source(2, 0.3), BinaryMatrix::identity(3)), Error);
}

TEST(LengthBounds, ClosedFormExamples) {
  // Uniform 3-bit key, trivial side: H_min = 3, eps2 = 1/2 gives 3 - 2 + 2.
  const auto mix = DensityOperator::maximally_mixed({1});
  const CqState uniform(std::vector<double>(8, 0.125), std::vector<DensityOperator>(8, mix));
  EXPECT_EQ(protocols::pa_length_bound(uniform, 0.0, 0.5).length, 3u);
  // Deterministic Z: H_min = 0, 0 - 2 log 10 + 2 < 0 clamps to 0.
  std::vector<double> det(8, 0.0);
  det[0] = 1.0;
  EXPECT_EQ(protocols::pa_length_bound(CqState(det, std::vector<DensityOperator>(8, mix)), 0.0, 0.1).length, 0u);
  // Orthogonal conditionals: H_max = 0, 0 + 4 + 4 clamps to n.
  const auto lb = protocols::csi_length_bound(orthogonal_cq(3), 0.0, 0.25);
  EXPECT_NEAR(lb.raw, 8.0, 1e-6);
  EXPECT_EQ(lb.length, 3u);
  EXPECT_THROW(protocols::pa_length_bound(uniform, 0.0, 0.0), Error);
}

TEST(LengthBounds, ComposeWithSmoothEntropies) {
  const auto src = harness::iid_qubit_source(3, 0.6);
  const auto pa = protocols::pa_length_bound(src, 0.05, 0.05);
  const double hmin = entropy::smooth_min_entropy(src, SmoothingBall(0.05));
  EXPECT_NEAR(pa.entropy, hmin, 1e-12);
  EXPECT_NEAR(pa.raw, hmin - 2 * std::log2(20.0) + 2, 1e-12);
  EXPECT_EQ(pa.length, static_cast<std::size_t>(std::clamp(std::floor(pa.raw + 1e-9), 0.0, 3.0)));
  const auto csi = protocols::csi_length_bound(src, 0.05, 0.05);
  const double hmax = entropy::smooth_max_entropy(src, SmoothingBall(0.05));
  EXPECT_NEAR(csi.raw, hmax + 2 * std::log2(20.0) + 4, 1e-12);
  EXPECT_LE(csi.length, 3u);
}

// Average over sampled uniform-linear hashes of p_secure stays below eps2 at
// the certified length (eps1 = 0), within Monte Carlo error.
TEST(LeftoverHash, AverageBelowEps2) {
  const auto src = harness::iid_qubit_source(4, 0.1);
  const double eps2 = 0.5;
  const double hmin = entropy::min_entropy(src);
  const auto len = static_cast<std::size_t>(std::max(0.0, std::floor(hmin - 2 * std::log2(1 / eps2))));
  ASSERT_GE(len, 1u);
  double sum = 0, sq = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto g = binlin::sample_uniform(len, 4, qcore::derive_seed(1, t));
    const double p = protocols::p_secure(protocols::coarse_grain(src, g));
    sum += p;
    sq += p * p;
  }
  const double mean = sum / trials;
  const double se = std::sqrt(std::max(0.0, sq / trials - mean * mean) / trials);
  EXPECT_LE(mean, eps2 + 2 * se);
}
