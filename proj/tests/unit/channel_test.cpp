// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "qdc/channel.hpp"
#include "qdc/entropy.hpp"
#include "qdc/json_io.hpp"
#include "test_support.hpp"

namespace qdc {
namespace {

using testing::max_abs;
using testing::random_state;
using testing::rng_for;

CMatrix kraus_oracle(const KrausSet& k, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(k.dim_out, k.dim_out);
  for (const auto& op : k.operators) out += op * rho * op.adjoint();
  return out;
}

KrausSet random_kraus(int din, int dout, int count, double scale, std::mt19937_64& rng) {
  KrausSet k{din, dout, {}};
  const CMatrix v = haar_isometry(dout * count, din, rng);
  for (int c = 0; c < count; ++c) {
    CMatrix op(dout, din);
    for (int b = 0; b < dout; ++b) op.row(b) = v.row(b * count + c);
    k.operators.push_back(std::sqrt(scale) * op);
  }
  return k;
}

TEST(Channel, IdentityChoiIsMaximallyEntangled) {
  const Channel id = table2_builder(Table2Kind::Identity, 1);
  CVector phi = CVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  EXPECT_MATRIX_NEAR(id.choi().matrix(), CMatrix(phi * phi.adjoint()), 1e-14);
  EXPECT_NEAR(id.choi().trace(), 1.0, 1e-14);
  EXPECT_EQ(id.trace_class(), TraceClass::TracePreserving);
  EXPECT_EQ(id.choi().dims().labels(), (std::vector<std::string>{"A'", "B"}));
}

TEST(Channel, TraceClassification) {
  auto rng = rng_for("trace-class");
  EXPECT_EQ(choi_of(random_kraus(2, 3, 2, 1.0, rng)).trace_class(), TraceClass::TracePreserving);
  EXPECT_EQ(choi_of(random_kraus(2, 3, 2, 0.7, rng)).trace_class(), TraceClass::TraceNonIncreasing);
  EXPECT_EQ(choi_of(random_kraus(2, 3, 2, 1.3, rng)).trace_class(), TraceClass::General);
}

TEST(Channel, ApplicationMatchesKrausOracle) {
  for (int t = 0; t < 10; ++t) {
    auto rng = rng_for("apply", t);
    const KrausSet k = random_kraus(3, 2, 2 + t % 3, 1.0, rng);
    const Channel ch = choi_of(k);
    const StateOperator s = random_state(DimsLabel({{"A", 3}}), rng);
    const StateOperator out = apply(ch, s, {"A"});
    EXPECT_MATRIX_NEAR(out.matrix(), kraus_oracle(k, s.matrix()), 1e-12);
    EXPECT_MATRIX_NEAR(apply_kraus(k, s, {"A"}).matrix(), out.matrix(), 1e-12);
  }
}

TEST(Channel, ApplyOnInnerSubsystemKeepsPosition) {
  auto rng = rng_for("apply-inner");
  const KrausSet k = random_kraus(2, 3, 2, 1.0, rng);
  const Channel ch = choi_of(k);
  const StateOperator s = random_state(DimsLabel({{"E", 2}, {"A", 2}, {"F", 2}}), rng);
  const StateOperator out = apply(ch, s, {"A"});
  EXPECT_EQ(out.dims().labels(), (std::vector<std::string>{"E", "B", "F"}));
  // Oracle: (I (x) K (x) I) rho (...)^dagger summed.
  CMatrix expect = CMatrix::Zero(12, 12);
  for (const auto& op : k.operators) {
    const CMatrix full = kron(kron(CMatrix::Identity(2, 2), op), CMatrix::Identity(2, 2));
    expect += full * s.matrix() * full.adjoint();
  }
  EXPECT_MATRIX_NEAR(out.matrix(), expect, 1e-12);
}

TEST(Channel, KrausRoundTrip) {
  for (int t = 0; t < 10; ++t) {
    auto rng = rng_for("kraus-rt", t);
    const Channel ch = choi_of(random_kraus(2, 4, 1 + t % 4, t % 2 ? 1.0 : 0.6, rng));
    const KrausSet k = kraus_of(ch);
    EXPECT_LE(static_cast<int>(k.operators.size()), 1 + t % 4);
    EXPECT_MATRIX_NEAR(choi_of(k).choi().matrix(), ch.choi().matrix(), 1e-12);
  }
}

TEST(Channel, StinespringAndComplementary) {
  for (int t = 0; t < 6; ++t) {
    auto rng = rng_for("stinespring", t);
    const Channel ch = random_tpcpm(3, 2, 2 + t % 3, rng);
    const Stinespring st = stinespring(ch);
    EXPECT_MATRIX_NEAR(st.v.adjoint() * st.v, CMatrix::Identity(3, 3), 1e-12);
    const StateOperator s = random_state(DimsLabel({{"A", 3}}), rng);
    const CMatrix big = st.v * s.matrix() * st.v.adjoint();
    const std::vector<int> dims = {2, st.dim_env};
    EXPECT_MATRIX_NEAR(partial_trace_raw(big, dims, {0}), apply(ch, s, {"A"}).matrix(), 1e-12);
    EXPECT_MATRIX_NEAR(partial_trace_raw(big, dims, {1}), apply(complementary(ch), s, {"A"}).matrix(), 1e-12);
  }
}

TEST(Channel, TauBIsOutputOfMaximallyMixed) {
  auto rng = rng_for("tau-b");
  const Channel ch = random_tpcpm(3, 2, 2, rng);
  EXPECT_MATRIX_NEAR(ch.tau_b(), apply(ch, maximally_mixed(DimsLabel({{"A", 3}})), {"A"}).matrix(), 1e-12);
}

TEST(Channel, RandomTpcpmIsTracePreservingWithRequestedRank) {
  for (int t = 0; t < 5; ++t) {
    auto rng = rng_for("random-tpcpm", t);
    const Channel ch = random_tpcpm(2, 3, 1 + t % 3, rng);
    EXPECT_EQ(ch.trace_class(), TraceClass::TracePreserving);
    EXPECT_EQ(static_cast<int>(kraus_of(ch).operators.size()), 1 + t % 3);
  }
  auto rng = rng_for("random-tpcpm-bad");
  EXPECT_THROW(random_tpcpm(4, 1, 2, rng), Error);
}

// Table 2: H_min(A|B)_tau = -m, 0, m, -m', m - 2m'.
TEST(Channel, TableTwoMinEntropies) {
  for (int m = 1; m <= 2; ++m)
    for (int mp = 0; mp <= m; ++mp) {
      auto hmin = [](const Channel& ch) { return h_min(ch.choi(), {"A'"}, {"B"}).value; };
      EXPECT_NEAR(hmin(table2_builder(Table2Kind::Identity, m)), -m, 1e-6);
      EXPECT_NEAR(hmin(table2_builder(Table2Kind::Measure, m)), 0.0, 1e-6);
      EXPECT_NEAR(hmin(table2_builder(Table2Kind::Erase, m)), m, 1e-6);
      EXPECT_NEAR(hmin(table2_builder(Table2Kind::IdMeasure, m, mp)), -mp, 1e-6);
      EXPECT_NEAR(hmin(table2_builder(Table2Kind::IdTrace, m, mp)), m - 2 * mp, 1e-6);
    }
}

TEST(Channel, SpecParsing) {
  EXPECT_EQ(channel_from_spec("id+trace:3,1").dim_out(), 2);
  EXPECT_EQ(channel_from_spec("meas:2").dim_in(), 4);
  EXPECT_THROW(channel_from_spec("id"), Error);
  EXPECT_THROW(channel_from_spec("id:1,2"), Error);
  EXPECT_THROW(channel_from_spec("id+trace:1,2"), Error);
  EXPECT_THROW(channel_from_spec("swap:1"), Error);
  EXPECT_THROW(channel_from_spec("id:x"), Error);
}

TEST(Channel, JsonRoundTrip) {
  auto rng = rng_for("channel-json");
  const Channel ch = random_tpcpm(2, 2, 2, rng);
  const Channel back = channel_from_json(json::parse(channel_to_json(ch).dump()));
  EXPECT_MATRIX_NEAR(back.choi().matrix(), ch.choi().matrix(), 0.0);
  EXPECT_EQ(back.trace_class(), ch.trace_class());
}

TEST(Channel, RejectsNonPositiveChoi) {
  CMatrix j = CMatrix::Identity(4, 4) / 4.0;
  j(0, 0) = -0.1;
  EXPECT_THROW(Channel(2, 2, j), Error);
}

// tau is the channel output of a purification of rho_A: tr_A' tau = T(rho_A), tr_B tau
// = conj(rho_A), and entropies match those of (id (x) T) on an explicit purification.
TEST(ChannelProperty, ConverseTauIsChannelOutputOfPurification) {
  for (int t = 0; t < 8; ++t) {
    auto rng = rng_for("converse-tau", t);
    const Channel ch = random_tpcpm(2, 2, 1 + t % 3, rng);
    const StateOperator rho(DimsLabel({{"A", 2}}), random_density(2, 2, rng));
    const StateOperator tau = converse_tau(ch, rho.matrix());
    EXPECT_NEAR(tau.trace(), 1.0, 1e-12);
    EXPECT_MATRIX_NEAR(partial_trace(tau, {"B"}).matrix(), apply(ch, rho, {"A"}).matrix(), 1e-12);
    EXPECT_MATRIX_NEAR(partial_trace(tau, {"A"}).matrix(), CMatrix(rho.matrix().conjugate()), 1e-12);
    const PureState psi = purify(rho, "R");
    const StateOperator out = apply(ch, psi.density(), {"A"});
    EXPECT_NEAR(h_min(tau, {"A"}, {"B"}).value, h_min(out, {"R"}, {"B"}).value, 1e-6);
  }
}

TEST(ChannelProperty, ChoiMarginalOfTracePreservingMap) {
  for (int t = 0; t < 10; ++t) {
    auto rng = rng_for("choi-marginal", t);
    const Channel ch = random_tpcpm(3, 2, 2 + t % 4, rng);
    EXPECT_MATRIX_NEAR(partial_trace(ch.choi(), {"A'"}).matrix(), CMatrix(CMatrix::Identity(3, 3) / 3.0), 1e-12);
    EXPECT_GE(herm_eigenvalues(ch.choi().matrix()).minCoeff(), -1e-12);
  }
}

}  // namespace
}  // namespace qdc
