// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "qdc/merging.hpp"
#include "test_support.hpp"

namespace qdc {
namespace {

using testing::rng_for;

PureState pure(const DimsLabel& dims, std::mt19937_64& rng) { return PureState{dims, random_pure(static_cast<int>(dims.total()), rng)}; }

TEST(MeasurementIsometry, IsAnIsometryWithBlockLayout) {
  auto rng = rng_for("meas-iso");
  const CMatrix u = haar_unitary(8, rng);
  const MeasurementIsometry m = measurement_isometry(u, 2);
  EXPECT_EQ(m.num_outcomes, 4);
  ASSERT_EQ(m.w.rows(), 2 * 4 * 4);
  EXPECT_MATRIX_NEAR(m.w.adjoint() * m.w, CMatrix::Identity(8, 8), 1e-12);
  // Row (l, x, x) carries row xL + l of U; off-diagonal register pairs are empty.
  EXPECT_MATRIX_NEAR(m.w.row((1 * 4 + 3) * 4 + 3), u.row(3 * 2 + 1), 0.0);
  EXPECT_EQ(m.w.row((0 * 4 + 1) * 4 + 2).norm(), 0.0);
  EXPECT_THROW(measurement_isometry(u, 3), Error);
  EXPECT_THROW(measurement_isometry(u.leftCols(4), 2), Error);
}

TEST(Uhlmann, IdenticalStatesGiveIdentity) {
  auto rng = rng_for("uhlmann-id");
  const PureState s = pure(DimsLabel({{"R", 4}, {"B", 2}}), rng);
  const UhlmannResult r = uhlmann_isometry(s, s, {"B"}, {"B"});
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  EXPECT_NEAR(r.marginal_fidelity, 1.0, 1e-7);
  EXPECT_MATRIX_NEAR(r.v, CMatrix::Identity(2, 2), 1e-10);
}

TEST(Uhlmann, RecoversLocalUnitary) {
  auto rng = rng_for("uhlmann-local");
  const PureState s = pure(DimsLabel({{"R", 3}, {"B", 3}}), rng);
  const CMatrix ub = haar_unitary(3, rng);
  const PureState t{s.dims, kron(CMatrix::Identity(3, 3), ub) * s.amplitudes};
  const UhlmannResult r = uhlmann_isometry(s, t, {"B"}, {"B"});
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  EXPECT_MATRIX_NEAR(r.v, ub, 1e-10);
}

// Uhlmann: max_V |<t|(I (x) V)|s>| = F(rho_R, tau_R), with the Bob factors of different size.
TEST(UhlmannProperty, AttainsMarginalFidelity) {
  for (int t = 0; t < 10; ++t) {
    auto rng = rng_for("uhlmann-prop", t);
    const PureState s = pure(DimsLabel({{"R", 2}, {"E", 2}, {"B", 2 + t % 3}}), rng);
    const PureState g = pure(DimsLabel({{"B1", 2}, {"R", 2}, {"E", 2}, {"B2", 2}}), rng);
    const UhlmannResult r = uhlmann_isometry(s, g, {"B"}, {"B1", "B2"});
    const double oracle = fidelity(reduce_to(s.density(), {"R", "E"}), reduce_to(g.density(), {"R", "E"}));
    EXPECT_NEAR(r.marginal_fidelity, oracle, 1e-9) << "trial " << t;
    EXPECT_NEAR(r.fidelity, oracle, 1e-7) << "trial " << t;
    // V is a contraction, so no other decoder can exceed the bound.
    EXPECT_LE(herm_eigenvalues(r.v.adjoint() * r.v).maxCoeff(), 1.0 + 1e-10);
  }
}

TEST(Uhlmann, PreconditionsAreChecked) {
  auto rng = rng_for("uhlmann-pre");
  const PureState s = pure(DimsLabel({{"R", 2}, {"B", 2}}), rng);
  const PureState far = pure(DimsLabel({{"R", 2}, {"B", 2}}), rng);
  const double pd = purified_distance(reduce_to(s.density(), {"R"}), reduce_to(far.density(), {"R"}));
  EXPECT_THROW(uhlmann_isometry(s, far, {"B"}, {"B"}, pd / 2.0), Error);
  EXPECT_NO_THROW(uhlmann_isometry(s, far, {"B"}, {"B"}, pd + 1e-9));
  const PureState other = pure(DimsLabel({{"S", 2}, {"B", 2}}), rng);
  EXPECT_THROW(uhlmann_isometry(s, other, {"B"}, {"B"}), Error);
}

TEST(RealizeCost, RoundsUpToPowersOfTwo) {
  auto check = [](double target, int kappa, int ell) {
    const CostBound b = realize_cost(target);
    EXPECT_EQ(b.kappa, kappa) << target;
    EXPECT_EQ(b.ell, ell) << target;
    EXPECT_EQ(b.realized, kappa - ell) << target;
    EXPECT_GE(b.realized, target - 1e-9) << target;
  };
  check(14.3487, 15, 0);
  check(3.0, 3, 0);
  check(3.0 + 1e-12, 3, 0);
  check(0.0, 0, 0);
  check(-0.5, 0, 0);
  check(-2.3, 0, 2);
  check(-3.0, 0, 3);
  EXPECT_THROW(realize_cost(40.0), Error);
  EXPECT_THROW(realize_cost(std::nan("")), Error);
}

// Scalar oracle: H_max^delta(A|B)_Phi = -H_min^delta(A)_{I/2}. By unitary invariance the
// optimal rho-hat is c I/2 with F = sqrt(c), so H_max^delta = -1 + log(1 - delta^2).
TEST(CostBounds, MaximallyEntangledAchievable) {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const StateOperator phi(DimsLabel({{"A", 2}, {"B", 2}}), v * v.adjoint());
  const double eps = 0.2;
  const double delta = eps * eps / 13.0;
  const CostBound b = cost_achievable(phi, {"A"}, {"B"}, eps);
  const double offset = -4.0 * std::log2(eps) + 2.0 * std::log2(13.0);
  EXPECT_NEAR(b.raw, -1.0 + std::log2(1.0 - delta * delta) + offset, 1e-6);
  EXPECT_EQ(b.ell, 0);
  EXPECT_EQ(b.kappa, static_cast<int>(std::ceil(b.raw)));
  EXPECT_THROW(cost_achievable(phi, {"A"}, {"B"}, 0.0), Error);
  EXPECT_THROW(cost_converse(phi, {"A"}, {"B"}, 0.1), Error);
}

TEST(CostBoundsProperty, ConverseBelowAchievableAndMonotone) {
  for (int t = 0; t < 4; ++t) {
    auto rng = rng_for("cost-sandwich", t);
    const StateOperator rho = testing::random_state(DimsLabel({{"A", 2}, {"B", 2}}), rng, 1 + t);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.03, 0.04, 0.05}) {
      const CostBound ach = cost_achievable(rho, {"A"}, {"B"}, eps);
      const double conv = cost_converse(rho, {"A"}, {"B"}, eps);
      EXPECT_LE(conv, ach.raw) << "trial " << t << " eps " << eps;
      EXPECT_LT(ach.raw, prev) << "trial " << t << " eps " << eps;
      prev = ach.raw;
    }
  }
}

// Oracle: Phi^K (x) psi, U on (A0, A), projection onto rows [xL, (x+1)L) of U.
TEST(Merging, ExactRunMatchesExplicitProtocol) {
  auto rng = rng_for("merge-exact");
  const DimsLabel dims({{"A", 2}, {"B", 2}, {"E", 2}});
  MergingInstance in;
  in.psi = pure(dims, rng);
  in.k = 4;
  in.l = 2;
  in.mode = MergingMode::Exact;
  in.seed = RngSeed{5, "merge-exact"};
  const MergingResult r = run_merging(in);
  ASSERT_FALSE(r.sampled);
  ASSERT_EQ(r.num_outcomes, 4);
  EXPECT_NEAR(r.probability_sum, 1.0, 1e-9);
  EXPECT_LE(r.decoder_mismatch, 1e-7);
  EXPECT_NEAR(r.cost_bits, 1.0, 0.0);

  // The same U applied to the full vector (A0, A, B0, B, E) with dense algebra.
  auto urng = make_rng(RngSeed{5, "merge-exact/unitary"}, 0);
  const CMatrix u = haar_unitary(8, urng);
  const int k = 4, l = 2, n = 4;
  CVector phi = CVector::Zero(k * k);
  for (int i = 0; i < k; ++i) phi(i * k + i) = 0.5;
  const CVector joint = permute_vector_raw(kron(phi, in.psi.amplitudes), {k, k, 2, 2, 2}, {0, 2, 1, 3, 4});
  const CVector rotated = kron(u, CMatrix::Identity(k * 2 * 2, k * 2 * 2)) * joint;
  const CMatrix rho_e = reduce_to(in.psi.density(), {"E"}).matrix();
  const CMatrix target = kron(CMatrix::Identity(l, l) / static_cast<double>(l), rho_e);
  double fid = 0.0;
  for (int x = 0; x < n; ++x) {
    const CVector block = rotated.segment(static_cast<long>(x) * l * 16, l * 16);  // (A1, B0, B, E)
    const double p = block.squaredNorm();
    const CMatrix sigma = partial_trace_raw(block * block.adjoint(), {l, k, 2, 2}, {0, 3}) / p;
    const double f = fidelity(sigma, target);
    EXPECT_NEAR(r.per_outcome[x].p, p, 1e-12) << "outcome " << x;
    EXPECT_NEAR(r.per_outcome[x].fidelity, f, 1e-9) << "outcome " << x;
    EXPECT_NEAR(r.per_outcome[x].distance, trace_norm(sigma - target), 1e-9) << "outcome " << x;
    fid += std::sqrt(p / n) * f;
  }
  EXPECT_NEAR(r.fidelity, fid, 1e-9);
  EXPECT_LE(r.fidelity, 1.0 + 1e-12);
}

TEST(Merging, TrivialASystemIsFree) {
  auto rng = rng_for("merge-free");
  MergingInstance in;
  in.psi = pure(DimsLabel({{"A", 1}, {"B", 2}, {"E", 3}}), rng);
  in.mode = MergingMode::Exact;
  const MergingResult r = run_merging(in);
  EXPECT_EQ(r.cost_bits, 0.0);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-9);
}

TEST(Merging, InputValidation) {
  auto rng = rng_for("merge-bad");
  MergingInstance in;
  in.psi = pure(DimsLabel({{"A", 2}, {"B", 2}, {"E", 2}}), rng);
  in.k = 2;
  in.l = 3;
  EXPECT_THROW(run_merging(in), Error);
  in.l = 1;
  in.b = "A";
  EXPECT_THROW(run_merging(in), Error);
  in.b = "B";
  in.psi.amplitudes *= 2.0;
  EXPECT_THROW(run_merging(in), Error);
}

TEST(Merging, SeedsAreWorkerInvariant) {
  auto rng = rng_for("merge-workers");
  MergingInstance in;
  in.psi = pure(DimsLabel({{"A", 2}, {"B", 2}, {"E", 2}}), rng);
  in.k = 8;
  in.seed = RngSeed{0, "merge-workers"};
  for (MergingMode mode : {MergingMode::Exact, MergingMode::Sampled}) {
    in.mode = mode;
    in.workers = 1;
    const MergingSummary a = run_merging_seeds(in, {1, 2, 3});
    in.workers = 4;
    const MergingSummary b = run_merging_seeds(in, {1, 2, 3});
    ASSERT_EQ(a.runs.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.runs[i].fidelity, b.runs[i].fidelity);
    EXPECT_EQ(a.mean_fidelity, b.mean_fidelity);
    EXPECT_NE(a.runs[0].fidelity, a.runs[1].fidelity);
  }
}

// Sampled blocks are distributed as blocks of a Haar U, so the two modes agree in mean.
TEST(MergingProperty, SampledAgreesWithExact) {
  auto rng = rng_for("merge-modes");
  MergingInstance in;
  in.psi = pure(DimsLabel({{"A", 2}, {"B", 2}, {"E", 2}}), rng);
  in.k = 4;
  in.l = 2;
  in.seed = RngSeed{0, "merge-modes"};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 60; ++s) seeds.push_back(s);
  in.mode = MergingMode::Exact;
  const MergingSummary ex = run_merging_seeds(in, seeds);
  in.mode = MergingMode::Sampled;
  in.samples = 64;
  const MergingSummary sa = run_merging_seeds(in, seeds);
  for (const auto& r : sa.runs) EXPECT_TRUE(r.sampled);
  const double tol = 4.0 * std::hypot(ex.std_error, sa.std_error);
  EXPECT_NEAR(ex.mean_fidelity, sa.mean_fidelity, tol);
  double psum = 0.0;
  for (const auto& r : sa.runs) psum += r.probability_sum;
  EXPECT_NEAR(psum / 60.0, 1.0, 0.05);
}

TEST(Merging, BoundsAttachWhenEpsilonIsSet) {
  auto rng = rng_for("merge-bounds");
  MergingInstance in;
  in.psi = pure(DimsLabel({{"A", 2}, {"B", 2}, {"E", 2}}), rng);
  in.epsilon_target = 0.03;
  in.mode = MergingMode::Exact;
  const MergingResult r = run_merging(in);
  ASSERT_TRUE(r.bound_achievable.has_value());
  ASSERT_TRUE(r.bound_converse.has_value());
  EXPECT_LE(*r.bound_converse, r.bound_achievable->raw);
  in.epsilon_target = 0.3;
  const MergingResult r2 = run_merging(in);
  EXPECT_TRUE(r2.bound_achievable.has_value());
  EXPECT_FALSE(r2.bound_converse.has_value());
}

}  // namespace
}  // namespace qdc
