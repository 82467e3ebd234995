// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qdc/linalg.hpp"

namespace qdc::sdp {

/// One nonzero of a block-diagonal Hermitian matrix.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  cd value{0.0, 0.0};
};

/// Block-diagonal Hermitian matrix stored as its nonzeros (both triangles).
struct SparseBlockMatrix {
  std::vector<Entry> entries;
};

struct Constraint {
  SparseBlockMatrix a;
  double b = 0.0;
};

/// Standard primal form: minimize <C, X> subject to <A_i, X> = b_i and X >= 0 blockwise.
/// The dual reads: maximize b^T y subject to C - sum_i y_i A_i >= 0.
struct Problem {
  std::vector<int> block_dims;
  std::vector<CMatrix> c;
  std::vector<Constraint> constraints;
};

enum class Status { Optimal, Infeasible, MaxIter };
std::string to_string(Status s);

struct Options {
  int max_iter = 200;
  double gap_rel = 1e-7;     ///< |primal - dual| <= gap_rel * (1 + |primal|)
  double feas_tol = 1e-8;    ///< relative primal and dual residuals
  double kkt_reg = 1e-12;    ///< added to the Schur complement diagonal
  std::ostream* trace_csv = nullptr;  ///< optional iterate dump
};

struct IterateRecord {
  int iteration = 0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
};

struct Solution {
  std::vector<CMatrix> x;
  std::vector<CMatrix> z;
  RVector y;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  Status status = Status::MaxIter;
  int iterations = 0;
  std::vector<IterateRecord> history;
};

/// Throws Error(InvalidArgument) on malformed input.
void validate(const Problem& p);

/// Infeasible-start primal-dual interior-point method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector step, working directly on complex Hermitian blocks.
Solution solve(const Problem& p, const Options& opt = {});

// Inner product <A, X> = Re tr(A X) against dense blocks.
double inner(const SparseBlockMatrix& a, const std::vector<CMatrix>& x);

/// Real affine expression sum_k coeff_k y_k + constant in the dual variables.
struct LinExpr {
  std::vector<std::pair<int, cd>> terms;
  cd constant{0.0, 0.0};

  LinExpr& operator+=(const LinExpr& o);
  LinExpr scaled(cd s) const;
  LinExpr real_part() const;
};

/// n x n Hermitian variable: diagonal entries, then (re, im) of each upper entry.
struct HermitianVar {
  int n = 0;
  int offset = 0;
  LinExpr at(int i, int j) const;
  int count() const { return n * n; }
  CMatrix value(const RVector& y) const;
};

/// rows x cols complex variable, (re, im) per entry in row-major order.
struct ComplexVar {
  int rows = 0;
  int cols = 0;
  int offset = 0;
  LinExpr at(int i, int j) const;
  int count() const { return 2 * rows * cols; }
  CMatrix value(const RVector& y) const;
};

/// Assembles linear matrix inequalities F_0 + sum_k y_k F_k >= 0 with objective
/// maximize sum_k b_k y_k, then emits the equivalent standard-form Problem.
class LmiBuilder {
 public:
  int add_block(int dim);
  int add_scalar(double objective = 0.0);
  HermitianVar add_hermitian(int n);
  ComplexVar add_complex(int rows, int cols);
  void set_objective(int var, double coeff) { objective_[var] = coeff; }

  /// Adds e at (r, c) and conj(e) at (c, r) when r != c.
  void put(int block, int r, int c, const LinExpr& e);

  int num_vars() const { return static_cast<int>(objective_.size()); }
  Problem build() const;

 private:
  int new_vars(int n);

  std::vector<int> blocks_;
  std::vector<double> objective_;
  std::vector<std::map<std::tuple<int, int, int>, cd>> coeffs_;
  std::map<std::tuple<int, int, int>, cd> constant_;
};

}  // namespace qdc::sdp
