// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <gtest/gtest.h>

#include "qdc/haar.hpp"
#include "qdc/linalg.hpp"

namespace qdc::testing {

inline std::mt19937_64 rng_for(const std::string& stream, std::uint64_t index = 0) {
  return make_rng(RngSeed{20260101, stream}, index);
}

inline StateOperator random_state(const DimsLabel& dims, std::mt19937_64& rng, int rank = 0) {
  return StateOperator(dims, random_density(dims.total(), rank > 0 ? rank : dims.total(), rng));
}

inline PureState random_pure_state(const DimsLabel& dims, std::mt19937_64& rng) {
  return PureState{dims, random_pure(dims.total(), rng)};
}

inline CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cd(g(rng), g(rng));
  return hermitian_part(m);
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace qdc::testing

#define EXPECT_MATRIX_NEAR(a, b, tol) EXPECT_LE(::qdc::testing::max_abs((a) - (b)), (tol))
