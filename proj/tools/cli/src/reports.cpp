// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "qdc_cli/app.hpp"

namespace qdc::cli {

namespace {

// JSON has no infinities; they are written as null next to an explicit flag.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class T>
json optional_or_null(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json cost_json(const CostBound& c) {
  return json{{"raw", c.raw}, {"realized", c.realized}, {"kappa", c.kappa}, {"ell", c.ell}};
}

}  // namespace

json decoupling_results(const DecouplingReport& r) {
  const double margin = 3.0 * r.std_error;
  json j{{"empirical_mean", r.empirical_mean},
         {"std_error", r.std_error},
         {"bound_nonsmooth", finite_or_null(r.bound_nonsmooth)},
         {"bound_smooth", optional_or_null(r.bound_smooth)},
         {"epsilon", r.epsilon},
         {"num_samples", r.num_samples},
         {"h2_ae", r.h2_ae},
         {"h2_ab_tau", r.h2_ab_tau},
         {"hmin_ae", optional_or_null(r.hmin_ae)},
         {"hmin_ab_tau", optional_or_null(r.hmin_ab_tau)},
         {"acceptance_margin_std_errors", 3},
         {"bound_error", r.bound_error}};
  j["nonsmooth_holds"] = std::isfinite(r.bound_nonsmooth) && r.empirical_mean <= r.bound_nonsmooth + margin;
  j["smooth_holds"] = r.bound_smooth ? json(r.empirical_mean <= *r.bound_smooth + margin) : json(nullptr);
  j["per_sample_distances"] = r.per_sample_distances;
  return j;
}

json converse_results(const ConverseReport& r) {
  return json{{"lhs", finite_or_null(r.lhs)},
              {"rhs", r.rhs},
              {"holds", r.holds},
              {"slack", finite_or_null(r.slack)},
              {"measured_distance", r.measured_distance},
              {"vacuous", r.vacuous},
              {"smoothing_ae", r.smoothing_ae},
              {"hmin_ae", finite_or_null(r.hmin_ae)},
              {"hmax_ab_tau", r.hmax_ab_tau},
              {"hmin_b_tau", r.hmin_b_tau},
              {"hmax_ab_minus_hmin_b", r.hmax_ab_tau - r.hmin_b_tau},
              {"hmax_a_given_b_tau", r.hmax_a_given_b_tau}};
}

json merging_results(const MergingSummary& s) {
  json runs = json::array();
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    const MergingResult& r = s.runs[i];
    json outcomes = json::array();
    for (const auto& o : r.per_outcome)
      outcomes.push_back({{"x", o.x}, {"p", o.p}, {"fidelity", o.fidelity}, {"distance", o.distance}});
    runs.push_back({{"seed", s.seeds[i]},
                    {"fidelity", r.fidelity},
                    {"fidelity_std_error", r.fidelity_std_error},
                    {"cost_bits", r.cost_bits},
                    {"num_outcomes", r.num_outcomes},
                    {"sampled", r.sampled},
                    {"probability_sum", r.probability_sum},
                    {"decoder_mismatch", r.decoder_mismatch},
                    {"decoupled_fraction", r.decoupled_fraction},
                    {"per_outcome", std::move(outcomes)}});
  }
  json j{{"mean_fidelity", s.mean_fidelity}, {"std_error", s.std_error}, {"runs", std::move(runs)}};
  const MergingResult* first = s.runs.empty() ? nullptr : &s.runs.front();
  j["bound_achievable"] = first && first->bound_achievable ? cost_json(*first->bound_achievable) : json(nullptr);
  j["bound_converse"] = first ? optional_or_null(first->bound_converse) : json(nullptr);
  j["cost_bits"] = first ? json(first->cost_bits) : json(nullptr);
  return j;
}

json lemma_results(const std::vector<LemmaCheck>& checks) {
  json out = json::array();
  for (const auto& c : checks)
    out.push_back({{"name", c.name},
                   {"trials", c.trials},
                   {"failures", c.failures},
                   {"worst_slack", finite_or_null(c.worst_slack)},
                   {"first_failure", c.first_failure}});
  return out;
}

json make_report(json config, json seeds, json results, json timing) {
  return json{{"version", version()},
              {"config", std::move(config)},
              {"seeds", std::move(seeds)},
              {"results", std::move(results)},
              {"timing", std::move(timing)}};
}

}  // namespace qdc::cli
