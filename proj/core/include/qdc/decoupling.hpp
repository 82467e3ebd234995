// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdc/channel.hpp"
#include "qdc/entropy.hpp"
#include "qdc/haar.hpp"
#include "qdc/linalg.hpp"

namespace qdc {

/// The input subsystems `a` are scrambled by a Haar unitary and fed to `channel`; every
/// other factor of `state` is the reference E.
struct DecouplingExperiment {
  StateOperator state;
  Labels a = {"A"};
  Channel channel;
  int num_samples = 1000;
  double epsilon = 0.0;
  RngSeed seed;
  int workers = 1;
  /// Optimize sigma in the collision entropies instead of using the reduced state.
  bool optimize_h2 = false;
  /// The smooth bound needs min-entropy SDPs on A E, which dominate for large |A||E|.
  bool smooth_bound = true;
};

struct DecouplingReport {
  double empirical_mean = 0.0;
  double std_error = 0.0;
  double bound_nonsmooth = 0.0;
  std::optional<double> bound_smooth;
  double epsilon = 0.0;
  int num_samples = 0;
  std::vector<double> per_sample_distances;  ///< kept when num_samples <= 1e4
  RngSeed seed;
  double h2_ae = 0.0;
  double h2_ab_tau = 0.0;
  std::optional<double> hmin_ae;
  std::optional<double> hmin_ab_tau;
  std::string bound_error;  ///< entropy failure message; samples stay valid
};

inline constexpr int kMaxStoredSamples = 10000;

/// ||T(U rho U^dagger) - tau_B (x) rho_E||_1 with U acting on `a` jointly.
double sample_distance(const StateOperator& state, const Labels& a, const Channel& channel, const CMatrix& u);

/// Sample i uses haar_unitary(|A|, make_rng(seed, i)), so results do not depend on workers.
DecouplingReport run(const DecouplingExperiment& exp);

/// 2^{-(H2(A|E)_rho + H2(A'|B)_J) / 2}. Any completely positive map is allowed.
double bound_nonsmooth(const StateOperator& state, const Labels& a, const Channel& channel,
                       bool optimize_h2 = false);

/// 2^{-(Hmin^eps(A|E)_rho + Hmin^eps(A'|B)_J) / 2} + 12 eps. Requires tr J <= 1, and a
/// trace-preserving channel when eps > 0 since smoothing acts on normalized states.
double bound_smooth(const StateOperator& state, const Labels& a, const Channel& channel, double epsilon);

struct ConverseParams {
  double eps = 0.0;   ///< decoupling accuracy in trace norm
  double eps1 = 0.0;  ///< enters through -log(2 / eps1^2); must be positive
  double eps2 = 0.0;  ///< smoothing of Hmax(AB)_tau
  double eps3 = 0.0;  ///< smoothing of Hmin(B)_tau

  /// eps1 = sqrt(eps), eps2 = 0, eps3 = 2 sqrt(eps).
  static ConverseParams defaults(double eps);
};

struct ConverseReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double slack = 0.0;  ///< lhs - rhs
  double measured_distance = 0.0;
  /// Set when the smoothing of Hmin(A|E) reaches 1; lhs is then +infinity.
  bool vacuous = false;
  double smoothing_ae = 0.0;
  double hmin_ae = 0.0;
  double hmax_ab_tau = 0.0;
  double hmin_b_tau = 0.0;
  /// Hmax^{eps2}(A|B)_tau, reported next to Hmax(AB) - Hmin(B) without any assertion.
  double hmax_a_given_b_tau = 0.0;
};

/// ||T(rho_AE) - T(rho_A) (x) rho_E||_1.
double decoupling_distance(const StateOperator& state, const Labels& a, const Channel& channel);

/// Checks Hmin^{eps1+2eps2+eps3+sqrt(2eps)}(A|E)_rho + Hmax^{eps2}(AB)_tau - Hmin^{eps3}(B)_tau
/// >= -log(2/eps1^2) with tau = converse_tau(channel, rho_A). Throws Error(Precondition) when
/// the measured decoupling distance exceeds eps or the channel is not trace preserving.
ConverseReport converse_check(const StateOperator& state, const Labels& a, const Channel& channel,
                              const ConverseParams& params);

struct LemmaCheck {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst_slack = 0.0;  ///< smallest (rhs - lhs) margin seen, normalized per check
  double seconds = 0.0;
  std::string first_failure;  ///< description of the first violating trial, if any
};

/// Randomized checks of the swap trick, the twirl formula, the purity ratio, the weighted
/// trace-norm bound (with near-singular sigma), the Weyl depolarization identity,
/// Fuchs-van de Graaf and the extension map. Dimensions range over {2, 3, 4}.
std::vector<LemmaCheck> verify_proof_lemmas(std::uint64_t seed, int trials);

/// SDP-backed entropy inequalities: H2 >= Hmin, superadditivity, the dimension bounds,
/// the classical-register formula and the chain rule.
std::vector<LemmaCheck> verify_entropy_lemmas(std::uint64_t seed, int trials);

}  // namespace qdc
