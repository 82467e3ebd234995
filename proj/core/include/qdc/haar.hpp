// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qdc/linalg.hpp"

namespace qdc {

/// Experiment seed. Sample i of a stream is drawn from a generator that depends only on
/// (seed, stream, i), so any scheduling of samples yields identical results.
struct RngSeed {
  std::uint64_t seed = 0;
  std::string stream = "default";
};

std::uint64_t splitmix64(std::uint64_t x);
std::mt19937_64 make_rng(const RngSeed& s, std::uint64_t index);

/// Ginibre matrix, QR, then columns rescaled by the phases of diag(R).
CMatrix haar_unitary(int d, std::mt19937_64& rng);
/// First k columns of a Haar unitary on C^n: a Haar-distributed n x k isometry.
CMatrix haar_isometry(int n, int k, std::mt19937_64& rng);

/// Induced-measure mixed state G G^dagger / tr, with G a d x rank Ginibre matrix.
CMatrix random_density(int d, int rank, std::mt19937_64& rng);
/// Uniformly random unit vector in C^d.
CVector random_pure(int d, std::mt19937_64& rng);

struct TwirlCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Haar average of (U (x) U) M (U (x) U)^dagger for Hermitian M on A (x) A'. Solves
/// tr M = alpha d^2 + beta d and tr MF = alpha d + beta d^2; d = 1 gives (tr M, 0).
std::pair<TwirlCoefficients, CMatrix> twirl_exact(const CMatrix& m);

/// X^a Z^b for a, b in [0, d), index a*d + b; the first operator is the identity.
std::vector<CMatrix> weyl_operators(int d);

}  // namespace qdc
