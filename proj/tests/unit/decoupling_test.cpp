// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>

#include "qdc/decoupling.hpp"
#include "test_support.hpp"

namespace qdc {
namespace {

using testing::random_state;
using testing::rng_for;

// Reference implementation through the labeled API.
double distance_oracle(const StateOperator& state, const Channel& ch, const CMatrix& u) {
  const StateOperator rotated = conjugate_local(state, {"A"}, u);
  const StateOperator out = apply(ch, rotated, {"A"});
  Labels e;
  for (const auto& l : state.dims().labels())
    if (l != "A") e.push_back(l);
  const CMatrix rho_e = reduce_to(state, e).matrix();
  return trace_norm(permute(out, [&] {
                      Labels order = {"B"};
                      order.insert(order.end(), e.begin(), e.end());
                      return order;
                    }()).matrix() -
                    kron(ch.tau_b(), rho_e));
}

TEST(Decoupling, SampleDistanceMatchesOracleOnBothPaths) {
  // |A| = 2, |B| = 1 takes the Choi-rotation path; |A| = 2, |B| = 4, |E| = 1 the direct one.
  for (int t = 0; t < 6; ++t) {
    auto rng = rng_for("sample-distance", t);
    const bool rotate = t % 2 == 0;
    const int de = rotate ? 8 : 1;
    const Channel ch = rotate ? channel_from_spec("id+trace:1,0") : random_tpcpm(2, 4, 1, rng);
    const StateOperator s = random_state(DimsLabel({{"A", 2}, {"E", de}}), rng);
    const CMatrix u = haar_unitary(2, rng);
    EXPECT_NEAR(sample_distance(s, {"A"}, ch, u), distance_oracle(s, ch, u), 1e-12) << "trial " << t;
  }
}

TEST(Decoupling, SampleDistanceOnInnerInputFactor) {
  auto rng = rng_for("inner-input");
  const StateOperator s = random_state(DimsLabel({{"E", 2}, {"A", 2}}), rng);
  const Channel ch = random_tpcpm(2, 2, 2, rng);
  const CMatrix u = haar_unitary(2, rng);
  EXPECT_NEAR(sample_distance(s, {"A"}, ch, u), distance_oracle(s, ch, u), 1e-12);
}

TEST(Decoupling, RejectsBadInputs) {
  auto rng = rng_for("bad-inputs");
  const StateOperator s = random_state(DimsLabel({{"A", 2}, {"E", 2}}), rng);
  const Channel ch = channel_from_spec("id:1");
  EXPECT_THROW(sample_distance(s, {"A"}, ch, CMatrix::Identity(2, 2) * 2.0), Error);
  EXPECT_THROW(sample_distance(s, {"A"}, channel_from_spec("id:2"), CMatrix::Identity(4, 4)), Error);
  EXPECT_THROW(sample_distance(s, {"X"}, ch, CMatrix::Identity(2, 2)), Error);
  DecouplingExperiment exp{s, {"A"}, ch};
  exp.num_samples = 0;
  EXPECT_THROW(run(exp), Error);
}

TEST(Decoupling, ExactCases) {
  // Maximally mixed A independent of E is invariant under U; erasure outputs a constant.
  const StateOperator mixed = maximally_mixed(DimsLabel({{"A", 4}, {"E", 2}}));
  auto rng = rng_for("exact-cases");
  const CMatrix u = haar_unitary(4, rng);
  EXPECT_NEAR(sample_distance(mixed, {"A"}, channel_from_spec("id:2"), u), 0.0, 1e-12);
  const StateOperator s = random_state(DimsLabel({{"A", 2}, {"E", 2}}), rng);
  EXPECT_NEAR(sample_distance(s, {"A"}, channel_from_spec("erase:1"), haar_unitary(2, rng)), 0.0, 1e-12);
  EXPECT_NEAR(decoupling_distance(s, {"A"}, channel_from_spec("erase:1")), 0.0, 1e-12);
}

TEST(Decoupling, DecouplingDistanceOfMaximallyEntangledUnderIdentity) {
  // ||Phi - I/4||_1 = 2 (1 - 1/4) for the 2x2 maximally entangled state.
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const StateOperator phi(DimsLabel({{"A", 2}, {"E", 2}}), v * v.adjoint());
  EXPECT_NEAR(decoupling_distance(phi, {"A"}, channel_from_spec("id:1")), 1.5, 1e-12);
}

TEST(Decoupling, RunIsWorkerInvariantAndConsistent) {
  auto rng = rng_for("run-workers");
  DecouplingExperiment exp;
  exp.state = random_state(DimsLabel({{"A", 2}, {"E", 2}}), rng);
  exp.channel = random_tpcpm(2, 2, 2, rng);
  exp.num_samples = 300;
  exp.seed = RngSeed{11, "workers"};
  const DecouplingReport r1 = run(exp);
  exp.workers = 4;
  const DecouplingReport r4 = run(exp);
  EXPECT_EQ(r1.per_sample_distances, r4.per_sample_distances);
  EXPECT_EQ(r1.empirical_mean, r4.empirical_mean);
  EXPECT_EQ(r1.std_error, r4.std_error);
  ASSERT_EQ(static_cast<int>(r1.per_sample_distances.size()), 300);
  const double mean = std::accumulate(r1.per_sample_distances.begin(), r1.per_sample_distances.end(), 0.0) / 300.0;
  EXPECT_NEAR(r1.empirical_mean, mean, 1e-12);
  ASSERT_TRUE(r1.bound_smooth.has_value());
  EXPECT_NEAR(*r1.bound_smooth, bound_smooth(exp.state, {"A"}, exp.channel, 0.0), 1e-9);
  EXPECT_NEAR(r1.bound_nonsmooth, bound_nonsmooth(exp.state, {"A"}, exp.channel), 1e-12);
  EXPECT_TRUE(r1.bound_error.empty());
}

TEST(Decoupling, SmoothBoundPreconditions) {
  auto rng = rng_for("smooth-pre");
  const StateOperator s = random_state(DimsLabel({{"A", 2}, {"E", 2}}), rng);
  KrausSet k{2, 2, {CMatrix::Identity(2, 2) * std::sqrt(0.5)}};
  const Channel tni = choi_of(k);
  EXPECT_NO_THROW(bound_smooth(s, {"A"}, tni, 0.0));
  EXPECT_THROW(bound_smooth(s, {"A"}, tni, 0.05), Error);
  KrausSet g{2, 2, {CMatrix::Identity(2, 2) * std::sqrt(2.0)}};
  EXPECT_THROW(bound_smooth(s, {"A"}, choi_of(g), 0.0), Error);
  EXPECT_NO_THROW(bound_nonsmooth(s, {"A"}, choi_of(g)));
}

TEST(Decoupling, LargeSampleCountsDropPerSampleData) {
  DecouplingExperiment exp;
  exp.state = maximally_mixed(DimsLabel({{"A", 2}, {"E", 1}}));
  exp.channel = channel_from_spec("id:1");
  exp.num_samples = kMaxStoredSamples + 1;
  exp.smooth_bound = false;
  const DecouplingReport r = run(exp);
  EXPECT_TRUE(r.per_sample_distances.empty());
  EXPECT_EQ(r.num_samples, kMaxStoredSamples + 1);
}

// Soundness of the non-smooth bound on random instances.
TEST(DecouplingProperty, NonSmoothBoundHolds) {
  for (int t = 0; t < 8; ++t) {
    auto rng = rng_for("prop-bound", t);
    DecouplingExperiment exp;
    exp.state = random_state(DimsLabel({{"A", 2 + t % 2}, {"E", 2}}), rng, 1 + t % 4);
    exp.channel = random_tpcpm(2 + t % 2, 2, 2 + t % 3, rng);
    exp.num_samples = 400;
    exp.seed = RngSeed{static_cast<std::uint64_t>(t), "prop-bound"};
    exp.epsilon = 0.0;
    const DecouplingReport r = run(exp);
    EXPECT_LE(r.empirical_mean, r.bound_nonsmooth + 3.0 * r.std_error) << "trial " << t;
    ASSERT_TRUE(r.bound_smooth.has_value());
    EXPECT_LE(r.empirical_mean, *r.bound_smooth + 3.0 * r.std_error) << "trial " << t;
  }
}

TEST(Converse, HoldsAndReportsBothEntropyForms) {
  // Erasure decouples exactly; take eps = 1e-3 so the smoothing stays below 1.
  auto rng = rng_for("converse");
  const StateOperator s = random_state(DimsLabel({{"A", 2}, {"E", 2}}), rng);
  const ConverseReport r = converse_check(s, {"A"}, channel_from_spec("erase:1"), ConverseParams::defaults(1e-3));
  EXPECT_FALSE(r.vacuous);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.slack, r.lhs - r.rhs, 1e-12);
  EXPECT_NEAR(r.rhs, -std::log2(2.0 / 1e-3), 1e-12);
  EXPECT_TRUE(std::isfinite(r.hmax_a_given_b_tau));
}

TEST(Converse, PreconditionsAndVacuousRegime) {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const StateOperator phi(DimsLabel({{"A", 2}, {"E", 2}}), v * v.adjoint());
  const Channel id = channel_from_spec("id:1");
  EXPECT_THROW(converse_check(phi, {"A"}, id, ConverseParams::defaults(0.1)), Error);
  EXPECT_THROW(converse_check(phi, {"A"}, id, ConverseParams::defaults(1.5)), Error);
  // Smoothing on A|E is (3 + sqrt 2) sqrt(eps) >= 1 at eps = 0.1 while eps3 = 2 sqrt(eps) < 1.
  const ConverseReport r = converse_check(phi, {"A"}, channel_from_spec("erase:1"), ConverseParams::defaults(0.1));
  EXPECT_TRUE(r.vacuous);
  EXPECT_TRUE(r.holds);
  KrausSet k{2, 2, {CMatrix::Identity(2, 2) * std::sqrt(0.5)}};
  EXPECT_THROW(converse_check(phi, {"A"}, choi_of(k), ConverseParams::defaults(2.0)), Error);
}

TEST(Lemmas, ProofSuitePasses) {
  const auto checks = verify_proof_lemmas(7, 25);
  EXPECT_EQ(checks.size(), 8u);
  for (const auto& c : checks) {
    EXPECT_EQ(c.trials, 25) << c.name;
    EXPECT_EQ(c.failures, 0) << c.name << ": " << c.first_failure;
  }
  EXPECT_TRUE(verify_proof_lemmas(7, 0).empty());
}

TEST(Lemmas, EntropySuitePasses) {
  for (const auto& c : verify_entropy_lemmas(7, 4)) EXPECT_EQ(c.failures, 0) << c.name << ": " << c.first_failure;
}

TEST(Lemmas, SuitesAreDeterministic) {
  const auto a = verify_proof_lemmas(3, 5), b = verify_proof_lemmas(3, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].worst_slack, b[i].worst_slack) << a[i].name;
}

}  // namespace
}  // namespace qdc
