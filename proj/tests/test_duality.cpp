#include <gtest/gtest.h>

#include <cmath>

#include "dlab/duality.hpp"
#include "dlab/entropy.hpp"
#include "dlab/error.hpp"

using namespace dlab;
using entropy::Observable;

namespace {

PureStateVector ket(const Dims& dims, std::size_t index) { return PureStateVector::basis_state(dims, index); }

double h(const TripartiteState& st, Observable obs, const Subsystems& side) {
  return entropy::measured_cond_entropy(st.psi(), obs, st.a(), side);
}

bool is_valid_povm(const Povm& p) {
  ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(p.dim()), static_cast<Eigen::Index>(p.dim()));
  for (const auto& e : p.elements()) {
    if (qcore::eigh(e).values.minCoeff() < -1e-9) return false;
    sum += e;
  }
  return (sum - ComplexMatrix::Identity(sum.rows(), sum.cols())).norm() < 1e-8;
}

}  // namespace

TEST(TripartiteStateTest, LabelsMustPartition) {
  const auto psi = qcore::haar_state({2, 2, 2}, 1);
  EXPECT_NO_THROW(TripartiteState(psi, {0}, {1}, {2}));
  EXPECT_THROW(TripartiteState(psi, {0}, {1}, {1, 2}), Error);
  EXPECT_THROW(TripartiteState(psi, {0}, {1}, {}), Error);
  EXPECT_THROW(TripartiteState(psi, {}, {0, 1}, {2}), Error);
  EXPECT_THROW(TripartiteState(psi, {0}, {1}, {2}, {2}), Error);
}

TEST(CoherentMeasurement, ProjectiveCopier) {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = p0;
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  const auto u = duality::coherent_measurement(Povm({p0, p1})).matrix();
  ASSERT_EQ(u.rows(), 4);
  // |b> -> |b>_M |b>_B
  EXPECT_NEAR(std::abs(u(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(u(3, 1)), 1.0, 1e-14);
  EXPECT_NEAR(u.norm(), std::sqrt(2.0), 1e-14);
}

TEST(CoherentMeasurement, SingleElementEmbedding) {
  const auto u = duality::coherent_measurement(Povm({ComplexMatrix::Identity(3, 3)})).matrix();
  EXPECT_LT((u - ComplexMatrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(CoherentMeasurement, RandomQutritPovmIsIsometry) {
  // Random 3-outcome POVM from the columns of a Haar unitary on C^3 (x) C^3.
  const auto w = qcore::haar_unitary(9, 4).leftCols(3);
  std::vector<ComplexMatrix> el;
  for (int k = 0; k < 3; ++k) {
    const ComplexMatrix blk = w.middleRows(3 * k, 3);
    el.push_back(blk.adjoint() * blk);
  }
  const auto u = duality::coherent_measurement(Povm(el)).matrix();
  EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(3, 3)).norm(), 1e-9);
}

TEST(Theorem1, GhzFixture) {
  const auto rep = duality::verify_theorem1(duality::ghz_fixture());
  EXPECT_NEAR(rep.epsilon, 0.0, 1e-7);
  EXPECT_NEAR(rep.achieved, 0.0, 1e-12);
  EXPECT_TRUE(rep.pass);
  ASSERT_TRUE(rep.coherent_overlap.has_value());
  EXPECT_NEAR(*rep.coherent_overlap, 1.0, 1e-6);
}

TEST(Theorem1, MaximallyEntangledTrivialR) {
  for (std::size_t d : {2u, 3u}) {
    const auto rep = duality::verify_theorem1(duality::max_entangled_fixture(d));
    EXPECT_NEAR(rep.epsilon, 0.0, 1e-7);
    EXPECT_NEAR(rep.achieved, 0.0, 1e-12);
  }
}

TEST(Theorem1, RandomStatesNoViolation) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto rep = duality::verify_theorem1(duality::random_tripartite({2 + s % 2}, {2}, {2}, s));
    EXPECT_TRUE(rep.pass) << "seed " << s << " slack " << rep.slack;
    // sqrt(Lambda) >= Lambda
    EXPECT_GE(*rep.coherent_overlap, 1 - rep.epsilon - 1e-7);
  }
}

TEST(CaseA, IdealKeyState) {
  const auto theta = qcore::haar_state({2, 2}, 3);
  const auto st = duality::build_case_a_state({0.5, 0.5}, {theta, theta}, {2}, 1);
  EXPECT_LE(h(st, Observable::X, st.b()), 1e-8);
  EXPECT_NEAR(h(st, Observable::X, st.r()), 1.0, 1e-9);
  const auto rep = duality::recover_measurement_case_a(st);
  EXPECT_NEAR(rep.epsilon, 0.0, 1e-12);
  EXPECT_NEAR(rep.achieved, 1.0, 1e-9);
}

TEST(CaseA, FullyLeakedState) {
  const auto st = duality::build_case_a_state({0.5, 0.5}, {ket({2}, 0), ket({2}, 1)}, {2}, 0);
  EXPECT_NEAR(h(st, Observable::X, st.r()), 0.0, 1e-9);
  const auto rep = duality::recover_measurement_case_a(st);
  ASSERT_TRUE(rep.measurement.has_value());
  EXPECT_TRUE(is_valid_povm(*rep.measurement));
  EXPECT_TRUE(rep.pass);
}

TEST(CaseA, RandomStatesBoundHolds) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Dims a = s % 2 ? Dims{2} : Dims{2, 2};
    const auto st = duality::random_case_a_state(a, {2}, {2}, s, s % 3 ? 0.05 * (s % 7) : -1.0);
    EXPECT_LE(h(st, Observable::X, st.b()), 1e-8);
    const auto rep = duality::recover_measurement_case_a(st);
    EXPECT_TRUE(rep.pass) << s;
    EXPECT_TRUE(is_valid_povm(*rep.measurement));
  }
}

TEST(CaseB, DeterministicAndGhzLike) {
  const auto phi = qcore::haar_state({2, 2}, 8);
  const auto det = duality::build_case_b_state({1.0, 0.0}, {phi, phi}, {2}, 1);
  EXPECT_LE(h(det, Observable::Z, det.r()), 1e-8);
  const auto rep = duality::recover_measurement_case_b(det);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(is_valid_povm(*rep.measurement));

  const auto ghz = duality::build_case_b_state({0.5, 0.5}, {ket({2}, 0), ket({2}, 1)}, {2}, 1);
  EXPECT_NEAR(h(ghz, Observable::Z, ghz.b()), 0.0, 1e-9);
  const auto r2 = duality::recover_measurement_case_b(ghz);
  EXPECT_NEAR(r2.epsilon, 0.0, 1e-12);
  EXPECT_NEAR(r2.achieved, 1.0, 1e-9);
}

TEST(CaseB, RandomStatesBoundHolds) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Dims a = s % 2 ? Dims{2} : Dims{2, 2};
    const auto st = duality::random_case_b_state(a, {2}, {2}, s, s % 3 ? 0.05 * (s % 7) : -1.0);
    EXPECT_LE(h(st, Observable::Z, st.r()), 1e-8);
    const auto rep = duality::recover_measurement_case_b(st);
    EXPECT_TRUE(rep.pass) << s;
  }
}

TEST(CaseChecks, PreconditionEnforced) {
  const auto st = duality::random_tripartite({2}, {2}, {2}, 5);
  try {
    duality::recover_measurement_case_a(st);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Precondition);
  }
  EXPECT_THROW(duality::recover_measurement_case_b(st), Error);
}

TEST(Pairing, ComplementRowsAreOrthogonalToInput) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const std::size_t m = 1 + s % 4;
    const auto f = binlin::sample_full_rank(m, 5, s);
    const auto g = duality::paired_extractor(f);
    EXPECT_EQ(g.rows(), 5 - m);
    for (std::size_t i = 0; i < f.rows(); ++i)
      for (std::size_t j = 0; j < g.rows(); ++j) EXPECT_FALSE(f.row(i).dot(g.row(j)));
    EXPECT_EQ(duality::paired_compressor(f), g);
  }
}

TEST(CsiToPa, IdentityCompressorGivesEmptyKey) {
  const auto st = duality::build_case_b_state({0.25, 0.25, 0.25, 0.25},
                                              {ket({4}, 0), ket({4}, 1), ket({4}, 2), ket({4}, 3)}, {2, 2}, 1);
  const auto rep = duality::csi_to_pa(BinaryMatrix::identity(2), st);
  EXPECT_NEAR(rep.epsilon, 0.0, 1e-12);
  EXPECT_EQ(rep.key_length, 0u);
  EXPECT_EQ(rep.compressed_length, 2u);
  EXPECT_TRUE(rep.pass);
}

TEST(CsiToPa, TwoQubitGhzParity) {
  // A = 2 qubits, B holds z exactly, R holds a copy: the parity compressor
  // leaves a 1-bit key from g_perp.
  ComplexVector v = ComplexVector::Zero(64);
  for (std::size_t z = 0; z < 4; ++z) v(static_cast<Eigen::Index>(z * 16 + z * 4 + z)) = 0.5;
  const TripartiteState st(PureStateVector(v, {2, 2, 4, 4}), {0, 1}, {2}, {3});
  const auto rep = duality::csi_to_pa(BinaryMatrix::from_rows({"11"}), st);
  EXPECT_EQ(rep.key_length, 1u);
  EXPECT_EQ(rep.key_length + rep.compressed_length, 2u);
  EXPECT_NEAR(rep.epsilon, 0.0, 1e-9);
  EXPECT_TRUE(rep.pass);
}

TEST(CsiToPa, RandomThreeQubitNoViolation) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto st = duality::random_tripartite({2, 2, 2}, {4}, {2}, s);
    const auto f = binlin::sample_full_rank(2, 3, s + 100);
    const auto rep = duality::csi_to_pa(f, st);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.key_length, 1u);
  }
}

TEST(PaToCsi, IdealCaseAIdentityExtractor) {
  const auto theta = qcore::haar_state({2}, 2);
  std::vector<PureStateVector> th(4, theta);
  const auto st = duality::build_case_a_state({0.25, 0.25, 0.25, 0.25}, th, {2, 2}, 0);
  const auto rep = duality::pa_to_csi(BinaryMatrix::identity(2), st, DualityCase::A);
  EXPECT_NEAR(rep.epsilon, 0.0, 1e-12);
  EXPECT_EQ(rep.compressed_length, 0u);
  EXPECT_NEAR(rep.achieved, 1.0, 1e-9);
}

TEST(PaToCsi, TwoQubitCaseBOneRow) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto st = duality::random_case_b_state({2, 2}, {2}, {}, s, 0.3);
    const auto g = binlin::sample_full_rank(1, 2, s);
    const auto rep = duality::pa_to_csi(g, st, DualityCase::B);
    EXPECT_EQ(rep.compressed_length, 1u);
    EXPECT_EQ(rep.key_length + rep.compressed_length, 2u);
    EXPECT_TRUE(rep.pass) << s;
  }
}

TEST(PaToCsi, ThreeQubitBothCases) {
  for (std::uint64_t s = 0; s < 12; ++s) {
    const auto g = binlin::sample_full_rank(1 + s % 2, 3, s);
    const auto a = duality::random_case_a_state({2, 2, 2}, {}, {2}, s, 0.2);
    EXPECT_TRUE(duality::pa_to_csi(g, a, DualityCase::A).pass);
    const auto b = duality::random_case_b_state({2, 2, 2}, {2}, {}, s, 0.2);
    EXPECT_TRUE(duality::pa_to_csi(g, b, DualityCase::B).pass);
  }
}

TEST(Uncertainty, PaperFixtures) {
  const auto phase = duality::check_uncertainty(duality::phase_fixture());
  EXPECT_NEAR(phase.h_x_r, 1.0, 1e-9);
  EXPECT_NEAR(phase.h_z_b, 1.0, 1e-9);
  const auto ghz = duality::check_uncertainty(duality::ghz_fixture());
  EXPECT_NEAR(ghz.h_x_r, 1.0, 1e-9);
  EXPECT_NEAR(ghz.h_z_b, 0.0, 1e-9);
  EXPECT_NEAR(ghz.slack, 0.0, 1e-9);
}

// H(X|R) = log d does not force H(Z|B) = 0 without the case hypotheses.
TEST(Uncertainty, CounterexampleGuard) {
  const auto st = duality::phase_fixture();
  EXPECT_NEAR(h(st, Observable::X, st.r()), 1.0, 1e-9);
  EXPECT_NEAR(h(st, Observable::Z, st.b()), 1.0, 1e-9);
}

TEST(Uncertainty, RandomStates) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto u = duality::check_uncertainty(duality::random_tripartite({2 + s % 2}, {2}, {2}, s));
    EXPECT_TRUE(u.pass) << s;
  }
}

TEST(SmoothUncertainty, VacuousAtHalf) {
  const auto u = duality::check_smooth_uncertainty(duality::random_tripartite({2}, {2}, {2}, 3), 0.5);
  EXPECT_TRUE(u.vacuous);
  EXPECT_TRUE(u.pass);
  EXPECT_NEAR(u.bound, 1 - 8 - 12, 1e-12);
}

TEST(SmoothUncertainty, GhzSmallDelta) {
  const auto u = duality::check_smooth_uncertainty(duality::ghz_fixture(), 0.01);
  EXPECT_GE(u.h_x_r, 1.0 - 1e-6);
  EXPECT_LT(u.bound, 0.0);
  EXPECT_TRUE(u.pass);
}

TEST(SmoothUncertainty, RejectsBadInput) {
  EXPECT_THROW(duality::check_smooth_uncertainty(duality::ghz_fixture(), 0.0), Error);
  EXPECT_THROW(duality::check_smooth_uncertainty(duality::max_entangled_fixture(3), 0.1), Error);
}
