// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>

#include "qdc/sdp.hpp"
#include "test_support.hpp"

namespace qdc {
namespace {

using testing::random_hermitian;
using testing::rng_for;

sdp::SparseBlockMatrix dense_entry(int block, const CMatrix& a) {
  sdp::SparseBlockMatrix s;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != cd(0.0, 0.0)) s.entries.push_back({block, i, j, a(i, j)});
  return s;
}

// Problem with a known strictly feasible pair: b = A(X0), C = Z0 + A^T(y0), X0, Z0 > 0.
sdp::Problem random_feasible(std::mt19937_64& rng, const std::vector<int>& blocks, int m) {
  sdp::Problem p;
  p.block_dims = blocks;
  std::vector<CMatrix> x0, z0;
  for (int n : blocks) {
    x0.push_back(random_density(n, n, rng) + 0.1 * CMatrix::Identity(n, n));
    z0.push_back(random_density(n, n, rng) + 0.1 * CMatrix::Identity(n, n));
    p.c.push_back(z0.back());
  }
  std::normal_distribution<double> g;
  for (int i = 0; i < m; ++i) {
    sdp::Constraint con;
    const double yi = g(rng);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const CMatrix a = random_hermitian(blocks[b], rng);
      auto part = dense_entry(static_cast<int>(b), a);
      con.a.entries.insert(con.a.entries.end(), part.entries.begin(), part.entries.end());
      con.b += (a * x0[b]).trace().real();
      p.c[b] += yi * a;
    }
    p.constraints.push_back(con);
  }
  return p;
}

TEST(Sdp, MinimumEigenvalueProblem) {
  auto rng = rng_for("sdp-eig");
  const CMatrix c = random_hermitian(5, rng);
  sdp::Problem p;
  p.block_dims = {5};
  p.c = {c};
  p.constraints.push_back({dense_entry(0, CMatrix::Identity(5, 5)), 1.0});
  const sdp::Solution s = sdp::solve(p);
  ASSERT_EQ(s.status, sdp::Status::Optimal);
  const double lmin = herm_eigenvalues(c).minCoeff();
  EXPECT_NEAR(s.primal_obj, lmin, 1e-6);
  EXPECT_NEAR(s.dual_obj, lmin, 1e-6);
  EXPECT_NEAR(s.y(0), lmin, 1e-6);
}

TEST(Sdp, TwoBlocksWithKnownOptimum) {
  // min x1 + 2 x2 subject to x1 + x2 = 1 over two 1x1 blocks: optimum 1 at x1 = 1.
  sdp::Problem p;
  p.block_dims = {1, 1};
  p.c = {CMatrix::Constant(1, 1, 1.0), CMatrix::Constant(1, 1, 2.0)};
  sdp::Constraint con;
  con.a.entries = {{0, 0, 0, 1.0}, {1, 0, 0, 1.0}};
  con.b = 1.0;
  p.constraints.push_back(con);
  const sdp::Solution s = sdp::solve(p);
  ASSERT_EQ(s.status, sdp::Status::Optimal);
  EXPECT_NEAR(s.primal_obj, 1.0, 1e-7);
  EXPECT_NEAR(s.x[0](0, 0).real(), 1.0, 1e-6);
}

TEST(Sdp, ComplexConstraintIsRespected) {
  // min tr(C X) subject to tr X = 1 and Im X_01 = 0.25 on a 2x2 block.
  sdp::Problem p;
  p.block_dims = {2};
  p.c = {CMatrix::Identity(2, 2)};
  p.c[0](0, 0) = 2.0;
  p.constraints.push_back({dense_entry(0, CMatrix::Identity(2, 2)), 1.0});
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = cd(0.0, 0.5);
  a(1, 0) = cd(0.0, -0.5);
  p.constraints.push_back({dense_entry(0, a), 0.25});
  const sdp::Solution s = sdp::solve(p);
  ASSERT_EQ(s.status, sdp::Status::Optimal);
  EXPECT_NEAR((a * s.x[0]).trace().real(), 0.25, 1e-7);
  EXPECT_GE(herm_eigenvalues(s.x[0]).minCoeff(), -1e-8);
}

TEST(Sdp, RandomFeasibleProblemsAreCertified) {
  for (int t = 0; t < 25; ++t) {
    auto rng = rng_for("sdp-random", t);
    const sdp::Problem p = random_feasible(rng, {2 + t % 3, 1 + t % 2}, 2 + t % 4);
    const sdp::Solution s = sdp::solve(p);
    ASSERT_EQ(s.status, sdp::Status::Optimal) << "trial " << t;
    EXPECT_LE(std::abs(s.gap), 1e-7 * (1.0 + std::abs(s.primal_obj)));
    for (const auto& x : s.x) EXPECT_GE(herm_eigenvalues(x).minCoeff(), -1e-8);
  }
}

// Weak duality on every iterate that is feasible to solver precision.
TEST(SdpProperty, WeakDualityOnFeasibleIterates) {
  for (int t = 0; t < 15; ++t) {
    auto rng = rng_for("sdp-weak", t);
    const sdp::Problem p = random_feasible(rng, {3}, 3);
    const sdp::Solution s = sdp::solve(p);
    for (const auto& rec : s.history)
      if (rec.primal_residual <= 1e-8 && rec.dual_residual <= 1e-8)
        EXPECT_GE(rec.gap, -1e-7 * (1.0 + std::abs(rec.primal_obj))) << "trial " << t << " it " << rec.iteration;
  }
}

TEST(Sdp, ValidateRejectsMalformedInput) {
  sdp::Problem p;
  p.block_dims = {2};
  p.c = {CMatrix::Identity(2, 2)};
  sdp::Constraint bad;
  bad.a.entries = {{0, 2, 0, 1.0}};
  p.constraints = {bad};
  EXPECT_THROW(sdp::validate(p), Error);
  p.constraints = {};
  p.c = {CMatrix::Identity(3, 3)};
  EXPECT_THROW(sdp::validate(p), Error);
  p.c = {CMatrix::Identity(2, 2)};
  p.c[0](0, 1) = 1.0;
  EXPECT_THROW(sdp::validate(p), Error);
}

TEST(Sdp, TraceCsvHasOneRowPerIterate) {
  sdp::Problem p;
  p.block_dims = {2};
  p.c = {CMatrix::Identity(2, 2)};
  p.constraints.push_back({dense_entry(0, CMatrix::Identity(2, 2)), 1.0});
  std::ostringstream csv;
  sdp::Options opt;
  opt.trace_csv = &csv;
  const sdp::Solution s = sdp::solve(p, opt);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iteration,primal_obj,dual_obj,gap");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(s.history.size()));
}

TEST(LmiBuilder, LargestEigenvalueByDualForm) {
  // maximize -t subject to t I - M >= 0: optimum -lambda_max(M).
  auto rng = rng_for("lmi");
  const CMatrix m = random_hermitian(4, rng);
  sdp::LmiBuilder lb;
  const int blk = lb.add_block(4);
  const int t = lb.add_scalar(-1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      sdp::LinExpr e;
      e.constant = -m(i, j);
      if (i == j) e.terms.push_back({t, 1.0});
      lb.put(blk, i, j, e);
    }
  const sdp::Solution s = sdp::solve(lb.build());
  ASSERT_EQ(s.status, sdp::Status::Optimal);
  EXPECT_NEAR(s.y(t), herm_eigenvalues(m).maxCoeff(), 1e-6);
}

TEST(LmiBuilder, HermitianVariableRoundTrip) {
  sdp::LmiBuilder lb;
  const auto h = lb.add_hermitian(3);
  EXPECT_EQ(h.count(), 9);
  RVector y = RVector::LinSpaced(lb.num_vars(), 1.0, 9.0);
  const CMatrix v = h.value(y);
  EXPECT_TRUE(is_hermitian(v, 0.0));
  EXPECT_EQ(v(0, 0), cd(1.0, 0.0));
  EXPECT_EQ(v(1, 1), cd(2.0, 0.0));
}

}  // namespace
}  // namespace qdc
