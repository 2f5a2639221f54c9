#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dlab/entropy.hpp"
#include "dlab/error.hpp"
#include "dlab/harness.hpp"
#include "dlab/sdp.hpp"

using namespace dlab;

namespace {

DensityOperator werner(double p) {
  ComplexMatrix phi = ComplexMatrix::Zero(4, 1);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  return DensityOperator(p * phi * phi.adjoint() + (1 - p) * ComplexMatrix::Identity(4, 4) / 4.0, {2, 2});
}

DensityOperator pure_qubit(double angle) {
  ComplexVector v(2);
  v << std::cos(angle), std::sin(angle);
  return DensityOperator::from_pure(PureStateVector(v, {2}));
}

CqState classical(std::vector<double> p) {
  std::vector<DensityOperator> c(p.size(), DensityOperator::maximally_mixed({1}));
  return CqState(std::move(p), std::move(c));
}

}  // namespace

TEST(Sdp, TwoByTwoCorrelation) {
  sdp::Problem pr;
  const auto blk = pr.add_block(2);
  const auto y = pr.add_variables(1);
  pr.add_constant(blk, 0, 0, ComplexMatrix::Identity(2, 2));
  pr.add_coefficient(y, blk, 0, 1, 1.0);
  pr.add_coefficient(y, blk, 1, 0, 1.0);
  pr.set_objective(y, 1.0);
  const auto sol = pr.solve();
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.value(), 1.0, 1e-8);
}

TEST(Sdp, SmallestEigenvalue) {
  ComplexMatrix a(3, 3);
  a << 2, Complex(0, 1), 0, Complex(0, -1), 2, 0.5, 0, 0.5, 3;
  sdp::Problem pr;
  const auto blk = pr.add_block(3);
  const auto t = pr.add_variables(1);
  pr.add_constant(blk, 0, 0, a);
  for (std::size_t i = 0; i < 3; ++i) pr.add_coefficient(t, blk, i, i, -1.0);
  pr.set_objective(t, 1.0);
  const auto sol = pr.solve();
  EXPECT_NEAR(sol.value(), qcore::eigh(a).values(0), 1e-8);
}

TEST(Sdp, TraceStreamEmitsOneRecordPerIteration) {
  sdp::Problem pr;
  const auto blk = pr.add_block(2);
  const auto y = pr.add_variables(1);
  pr.add_constant(blk, 0, 0, ComplexMatrix::Identity(2, 2));
  pr.add_coefficient(y, blk, 0, 1, 1.0);
  pr.add_coefficient(y, blk, 1, 0, 1.0);
  pr.set_objective(y, 1.0);
  std::ostringstream os;
  const auto sol = pr.solve({&os});
  std::size_t lines = 0;
  for (char c : os.str()) lines += c == '\n';
  EXPECT_EQ(static_cast<int>(lines), sol.iterations);
}

TEST(EntropyShannon, KnownValues) {
  EXPECT_NEAR(entropy::shannon({0.5, 0.5}), 1.0, 1e-14);
  EXPECT_NEAR(entropy::shannon({1.0, 0.0}), 0.0, 1e-14);
  EXPECT_NEAR(entropy::shannon({0.5, 0.25, 0.25}), 1.5, 1e-14);
  EXPECT_NEAR(entropy::von_neumann(DensityOperator::maximally_mixed({3})), std::log2(3.0), 1e-12);
}

TEST(EntropyConditional, BellAndProduct) {
  const auto w = werner(1.0);
  EXPECT_NEAR(entropy::cond_entropy(w, {1}), -1.0, 1e-10);
  const auto prod = qcore::kron(DensityOperator::maximally_mixed({2}), pure_qubit(0.3));
  EXPECT_NEAR(entropy::cond_entropy(prod, {1}), 1.0, 1e-10);
}

TEST(EntropyMinMax, BellState) {
  const auto w = werner(1.0);
  EXPECT_NEAR(entropy::min_entropy(w, {1}), -1.0, 1e-7);
  EXPECT_NEAR(entropy::max_entropy(w, {1}), -1.0, 1e-7);
  EXPECT_NEAR(entropy::max_entropy_direct(w, {1}), -1.0, 1e-7);
}

// Reference values from an independent cvxpy/SCS solve of the primal programs.
TEST(EntropyMinMax, WernerOracle) {
  const auto w = werner(0.7);
  EXPECT_NEAR(entropy::min_entropy(w, {1}), -0.6322682153, 1e-7);
  EXPECT_NEAR(entropy::max_entropy(w, {1}), 0.5343343806, 1e-7);
  EXPECT_NEAR(entropy::max_entropy_direct(w, {1}), 0.5343343806, 1e-7);
}

TEST(EntropyMinMax, ClassicalClosedForms) {
  const std::vector<double> p{0.5, 0.25, 0.25};
  const auto cq = classical(p);
  EXPECT_NEAR(entropy::min_entropy(cq), 1.0, 1e-7);
  double s = 0;
  for (double x : p) s += std::sqrt(x);
  EXPECT_NEAR(entropy::max_entropy(cq), 2 * std::log2(s), 1e-7);
  EXPECT_NEAR(entropy::min_entropy(cq.density(), {1}), 1.0, 1e-7);
  EXPECT_NEAR(entropy::max_entropy(cq.density(), {1}), 2 * std::log2(s), 1e-7);
}

TEST(EntropyMinMax, OrderingProperty) {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const auto r = qcore::random_density({2, 2}, 1 + s % 4, s);
    const double hmin = entropy::min_entropy(r, {1});
    const double h = entropy::cond_entropy(r, {1});
    const double hmax = entropy::max_entropy(r, {1});
    EXPECT_LE(hmin, h + 1e-7);
    EXPECT_LE(h, hmax + 1e-7);
    EXPECT_NEAR(hmax, entropy::max_entropy_direct(r, {1}), 1e-6);
  }
}

TEST(EntropyMinMax, PurificationDuality) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto psi = qcore::haar_state({2, 2, 2}, s);
    const double hmax = entropy::max_entropy(qcore::partial_trace(psi, {0, 1}), {1});
    const double hmin = entropy::min_entropy(qcore::partial_trace(psi, {0, 2}), {1});
    EXPECT_NEAR(hmax + hmin, 0.0, 1e-6);
  }
}

TEST(EntropySmooth, MonotoneInEpsilon) {
  const auto r = werner(0.7);
  double prev_min = entropy::min_entropy(r, {1});
  double prev_max = entropy::max_entropy(r, {1});
  for (double eps : {0.01, 0.05, 0.1, 0.2}) {
    const double smin = entropy::smooth_min_entropy(r, {1}, SmoothingBall(eps));
    const double smax = entropy::smooth_max_entropy(r, {1}, SmoothingBall(eps));
    EXPECT_GE(smin, prev_min - 1e-7);
    EXPECT_LE(smax, prev_max + 1e-7);
    prev_min = smin;
    prev_max = smax;
  }
}

TEST(EntropySmooth, CqRouteMatchesGeneric) {
  const auto cq = harness::iid_qubit_source(1, 0.4);
  const SmoothingBall ball(0.1);
  EXPECT_NEAR(entropy::smooth_min_entropy(cq, ball), entropy::smooth_min_entropy(cq.density(), {1}, ball), 1e-6);
  EXPECT_NEAR(entropy::smooth_max_entropy(cq, ball), entropy::smooth_max_entropy(cq.density(), {1}, ball), 1e-6);
}

TEST(EntropySmooth, BallValidation) {
  EXPECT_THROW(SmoothingBall(-0.1), Error);
  EXPECT_THROW(SmoothingBall(1.0), Error);
  EXPECT_NO_THROW(SmoothingBall(0.0));
}

TEST(GuessingProbability, HelstromTwoPureStates) {
  const double a = 0.6;
  const CqState cq({0.3, 0.7}, {pure_qubit(0.0), pure_qubit(a)});
  const double ov = std::cos(a);
  const double helstrom = 0.5 * (1 + std::sqrt(1 - 4 * 0.3 * 0.7 * ov * ov));
  const auto g = entropy::guessing_probability(cq);
  EXPECT_NEAR(g.p_guess, helstrom, 1e-7);
  EXPECT_NEAR(std::exp2(-entropy::min_entropy(cq)), helstrom, 1e-7);
}

TEST(GuessingProbability, TrineOracle) {
  std::vector<DensityOperator> tr;
  for (int k = 0; k < 3; ++k) tr.push_back(pure_qubit(2 * M_PI * k / 3));
  EXPECT_NEAR(entropy::guessing_probability(CqState({1. / 3, 1. / 3, 1. / 3}, tr)).p_guess, 2.0 / 3, 1e-7);
}

TEST(GuessingProbability, ThreeCopySourceOracle) {
  EXPECT_NEAR(entropy::guessing_probability(harness::iid_qubit_source(3, M_PI / 8)).p_guess, 0.3304291020, 1e-7);
}

TEST(GuessingProbability, PovmAchievesValue) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto psi = qcore::haar_state({3, 2, 2}, s);
    const auto cq = qcore::measure_basis(psi, qcore::Basis::Computational, 0).trace_side({0});
    const auto g = entropy::guessing_probability(cq);
    double achieved = 0;
    for (std::size_t z = 0; z < cq.alphabet(); ++z)
      achieved += cq.probs()[z] * (g.povm[z] * cq.conditional(z).matrix()).trace().real();
    EXPECT_NEAR(achieved, g.p_guess, 1e-7);
    EXPECT_LE(g.certificate.gap, 1e-7);
  }
}

TEST(MeasuredEntropy, GhzValues) {
  ComplexVector v = ComplexVector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  const PureStateVector ghz(v, {2, 2, 2});
  EXPECT_NEAR(entropy::measured_cond_entropy(ghz, entropy::Observable::Z, 0, {1}), 0.0, 1e-10);
  EXPECT_NEAR(entropy::measured_cond_entropy(ghz, entropy::Observable::X, 0, {2}), 1.0, 1e-10);
  EXPECT_NEAR(entropy::measured_cond_entropy(ghz, entropy::Observable::X, 0, {}), 1.0, 1e-10);
}
