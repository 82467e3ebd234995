// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdc/entropy.hpp"
#include "qdc/haar.hpp"
#include "qdc/linalg.hpp"

namespace qdc {

/// W = sum_x P^x (x) |x>_{X_A} |x>_{X_B} where P^x is rows [xL, (x+1)L) of U.
struct MeasurementIsometry {
  CMatrix w;  ///< (L * N * N) x (K|A|), row index (l * N + x_A) * N + x_B
  int num_outcomes = 0;
};

/// Throws Error(InvalidArgument) unless L divides the side of U.
MeasurementIsometry measurement_isometry(const CMatrix& u, int l);

struct UhlmannResult {
  CMatrix v;                      ///< Bob-side map, target_bob x sigma_bob dimensions
  double fidelity = 0.0;          ///< |<target| (I (x) V) |sigma>| for the normalized vectors
  double marginal_fidelity = 0.0; ///< F of the normalized reductions on the other factors
};

/// Decoder attaining Uhlmann's bound. V is the polar part of Psi_t^dagger Psi_sigma, where
/// Psi maps the Bob factors to the rest; it is a partial isometry when the Bob input is
/// larger than the support it needs to cover. The non-Bob factors of both states must
/// carry the same labels and dimensions. Throws Error(Precondition) if their normalized
/// reductions are further apart than `delta` in purified distance.
UhlmannResult uhlmann_isometry(const PureState& sigma, const PureState& target, const Labels& sigma_bob,
                               const Labels& target_bob, double delta = 1.0);

enum class MergingMode { Auto, Exact, Sampled };

/// Pure state on `a`, `b` and the remaining reference factors E. Alice holds A and half of
/// Phi^K; Bob holds B and the other half.
struct MergingInstance {
  PureState psi;
  std::string a = "A";
  std::string b = "B";
  int k = 1;
  int l = 1;
  double epsilon_target = 0.0;  ///< enables the cost bounds when positive
  RngSeed seed;
  MergingMode mode = MergingMode::Auto;
  /// Outcome blocks drawn per run in sampled mode.
  int samples = 64;
  int workers = 1;
};

struct OutcomeRecord {
  int x = 0;  ///< outcome index, or the sample index in sampled mode
  double p = 0.0;
  double fidelity = 0.0;  ///< F(sigma^x_{A1 E} / p_x, I/L (x) rho_E)
  double distance = 0.0;  ///< ||sigma^x_{A1 E} / p_x - I/L (x) rho_E||_1
};

struct CostBound {
  double raw = 0.0;       ///< Hmax^{eps^2/13}(A|B) - 4 log eps + 2 log 13
  double realized = 0.0;  ///< kappa - ell
  int kappa = 0;          ///< K = 2^kappa
  int ell = 0;            ///< L = 2^ell
};

struct MergingResult {
  /// F(eta, tau_{X_A X_B} (x) Phi^L (x) psi) with the classical registers decohered:
  /// sum_x sqrt(p_x / N) F_x. In sampled mode, the mean of sqrt(N p) F over blocks.
  double fidelity = 0.0;
  double fidelity_std_error = 0.0;  ///< across blocks, sampled mode only
  std::vector<OutcomeRecord> per_outcome;
  double cost_bits = 0.0;
  int num_outcomes = 0;
  bool sampled = false;
  double probability_sum = 0.0;  ///< exact: sum p_x; sampled: mean of N p
  /// Largest |F(V phi_x V^dagger, target) - F_x| over decoded outcomes (exact mode).
  double decoder_mismatch = 0.0;
  /// Probability-weighted fraction of outcomes with distance <= 4 eps.
  double decoupled_fraction = 0.0;
  std::optional<CostBound> bound_achievable;
  std::optional<double> bound_converse;
};

/// Runs the one-shot merging protocol once. Exact mode draws one Haar U on A0 A and decodes
/// every outcome; sampled mode (forced when K|A| exceeds the dimension cap) draws Haar
/// L-frames, each distributed as one block of a Haar U.
MergingResult run_merging(const MergingInstance& instance);

struct MergingSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<MergingResult> runs;
  double mean_fidelity = 0.0;
  double std_error = 0.0;
};

/// run_merging for each seed, sharing the instance stream name.
MergingSummary run_merging_seeds(MergingInstance instance, const std::vector<std::uint64_t>& seeds);

/// Smallest kappa - ell >= target with K = 2^kappa, L = 2^ell and min(kappa, ell) = 0.
CostBound realize_cost(double target);

/// Achievable cost, rounded up to a realizable log K - log L. Requires eps in (0, 1).
CostBound cost_achievable(const StateOperator& state, const Labels& target, const Labels& condition, double epsilon);

/// Hmax^{4 sqrt(eps)}(A|B) + log eps - 1. Requires 0 < 4 sqrt(eps) < 1.
double cost_converse(const StateOperator& state, const Labels& target, const Labels& condition, double epsilon);

}  // namespace qdc
