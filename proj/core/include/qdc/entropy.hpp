// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdc/linalg.hpp"
#include "qdc/sdp.hpp"

namespace qdc {

using Labels = std::vector<std::string>;

/// Entropies are in bits.
struct EntropyResult {
  double value = 0.0;
  std::optional<StateOperator> optimizer_sigma;  ///< normalized sigma_B witness
  std::optional<StateOperator> smoothed_state;   ///< rho-hat for smooth quantities
  double certificate_gap = 0.0;                  ///< |primal - dual| of the last SDP, 0 for closed forms
  bool lower_bound = false;                      ///< set when the value is not certified optimal
  double cross_check = 0.0;                      ///< |difference| between two independent routes, if any
};

/// H(A|B) = H(AB) - H(B).
double von_neumann(const StateOperator& state, const Labels& target, const Labels& condition = {});

/// -log of min tr sigma' subject to I (x) sigma' >= rho_AB.
EntropyResult h_min(const StateOperator& state, const Labels& target, const Labels& condition = {});

/// log F(rho_AB, I (x) sigma_B)^2 maximized over sigma_B, cross-checked against
/// -H_min(A|C) on a purification. Throws Error(Solver) if they differ by more than 1e-4.
EntropyResult h_max(const StateOperator& state, const Labels& target, const Labels& condition = {});

/// Collision entropy. Without optimization sigma_B = rho_B / tr rho_B; with it, a projected
/// gradient ascent over normalized sigma_B starting there.
EntropyResult h2(const StateOperator& state, const Labels& target, const Labels& condition = {},
                 bool optimize_sigma = false);

/// -log tr[((I (x) sigma^{-1/4}) rho (I (x) sigma^{-1/4}))^2] for a fixed sigma_B (generalized
/// inverse on its support). Throws Error(Precondition) if supp rho_B is not inside supp sigma_B.
double h2_at(const CMatrix& rho_ab, int dim_a, const CMatrix& sigma_b);

/// Maximum over rho-hat with tr rho-hat <= 1 and F(rho-hat, rho) >= sqrt(1 - eps^2).
/// Requires a normalized state and eps in [0, 1).
EntropyResult h_min_smooth(const StateOperator& state, const Labels& target, const Labels& condition,
                           double epsilon);

/// -H_min^eps(A|C) on a purification of rho_AB.
EntropyResult h_max_smooth(const StateOperator& state, const Labels& target, const Labels& condition,
                           double epsilon);

}  // namespace qdc
