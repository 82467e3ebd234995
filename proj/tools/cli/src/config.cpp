// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "qdc_cli/app.hpp"

namespace qdc::cli {

namespace {

template <class T>
void get_to(const json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

}  // namespace

std::string version() { return QDC_VERSION_STRING; }

bool GlobalConfig::operator==(const GlobalConfig& o) const {
  return dim_cap == o.dim_cap && tol.herm == o.tol.herm && tol.psd == o.tol.psd && tol.trace == o.tol.trace &&
         tol.pinv == o.tol.pinv && tol.kraus == o.tol.kraus;
}

json to_json(const GlobalConfig& c) {
  return json{{"dim_cap", c.dim_cap},
              {"tol_herm", c.tol.herm},
              {"tol_psd", c.tol.psd},
              {"tol_trace", c.tol.trace},
              {"tol_pinv", c.tol.pinv},
              {"tol_kraus", c.tol.kraus}};
}

void from_json(const json& j, GlobalConfig& c) {
  get_to(j, "dim_cap", c.dim_cap);
  get_to(j, "tol_herm", c.tol.herm);
  get_to(j, "tol_psd", c.tol.psd);
  get_to(j, "tol_trace", c.tol.trace);
  get_to(j, "tol_pinv", c.tol.pinv);
  get_to(j, "tol_kraus", c.tol.kraus);
}

json to_json(const EntropyConfig& c) {
  return json{{"state", c.state},         {"kind", c.kind},       {"target", c.target},
              {"condition", c.condition}, {"epsilon", c.epsilon}, {"optimize_sigma", c.optimize_sigma}};
}

void from_json(const json& j, EntropyConfig& c) {
  get_to(j, "state", c.state);
  get_to(j, "kind", c.kind);
  get_to(j, "target", c.target);
  get_to(j, "condition", c.condition);
  get_to(j, "epsilon", c.epsilon);
  get_to(j, "optimize_sigma", c.optimize_sigma);
}

json to_json(const DecoupleConfig& c) {
  return json{{"state", c.state},       {"channel", c.channel},         {"input", c.input},
              {"samples", c.samples},   {"epsilon", c.epsilon},         {"seed", c.seed},
              {"stream", c.stream},     {"workers", c.workers},         {"optimize_h2", c.optimize_h2},
              {"smooth_bound", c.smooth_bound}, {"csv", c.csv}};
}

void from_json(const json& j, DecoupleConfig& c) {
  get_to(j, "state", c.state);
  get_to(j, "channel", c.channel);
  get_to(j, "input", c.input);
  get_to(j, "samples", c.samples);
  get_to(j, "epsilon", c.epsilon);
  get_to(j, "seed", c.seed);
  get_to(j, "stream", c.stream);
  get_to(j, "workers", c.workers);
  get_to(j, "optimize_h2", c.optimize_h2);
  get_to(j, "smooth_bound", c.smooth_bound);
  get_to(j, "csv", c.csv);
}

json to_json(const ConverseConfig& c) {
  return json{{"state", c.state}, {"channel", c.channel}, {"input", c.input}, {"eps", c.eps},
              {"eps1", c.eps1},   {"eps2", c.eps2},       {"eps3", c.eps3}};
}

void from_json(const json& j, ConverseConfig& c) {
  get_to(j, "state", c.state);
  get_to(j, "channel", c.channel);
  get_to(j, "input", c.input);
  get_to(j, "eps", c.eps);
  get_to(j, "eps1", c.eps1);
  get_to(j, "eps2", c.eps2);
  get_to(j, "eps3", c.eps3);
}

json to_json(const MergeConfig& c) {
  return json{{"state", c.state}, {"a", c.a},       {"b", c.b},       {"epsilon", c.epsilon},
              {"seeds", c.seeds}, {"k", c.k},       {"l", c.l},       {"mode", c.mode},
              {"samples", c.samples}, {"workers", c.workers}};
}

void from_json(const json& j, MergeConfig& c) {
  get_to(j, "state", c.state);
  get_to(j, "a", c.a);
  get_to(j, "b", c.b);
  get_to(j, "epsilon", c.epsilon);
  get_to(j, "seeds", c.seeds);
  get_to(j, "k", c.k);
  get_to(j, "l", c.l);
  get_to(j, "mode", c.mode);
  get_to(j, "samples", c.samples);
  get_to(j, "workers", c.workers);
}

json to_json(const LemmasConfig& c) {
  return json{{"seed", c.seed}, {"trials", c.trials}, {"entropy_trials", c.entropy_trials}};
}

void from_json(const json& j, LemmasConfig& c) {
  get_to(j, "seed", c.seed);
  get_to(j, "trials", c.trials);
  get_to(j, "entropy_trials", c.entropy_trials);
}

json to_json(const GenStateConfig& c) {
  return json{{"kind", c.kind}, {"k", c.k},       {"rho_e", c.rho_e}, {"dim_e", c.dim_e},
              {"dims", c.dims}, {"rank", c.rank}, {"seed", c.seed}};
}

void from_json(const json& j, GenStateConfig& c) {
  get_to(j, "kind", c.kind);
  get_to(j, "k", c.k);
  get_to(j, "rho_e", c.rho_e);
  get_to(j, "dim_e", c.dim_e);
  get_to(j, "dims", c.dims);
  get_to(j, "rank", c.rank);
  get_to(j, "seed", c.seed);
}

json to_json(const GenChannelConfig& c) {
  return json{{"spec", c.spec}, {"dim_in", c.dim_in}, {"dim_out", c.dim_out}, {"rank", c.rank}, {"seed", c.seed}};
}

void from_json(const json& j, GenChannelConfig& c) {
  get_to(j, "spec", c.spec);
  get_to(j, "dim_in", c.dim_in);
  get_to(j, "dim_out", c.dim_out);
  get_to(j, "rank", c.rank);
  get_to(j, "seed", c.seed);
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  auto number = [&](const std::string& s) -> std::uint64_t {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument("seed");
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "seeds: cannot parse '" + s + "'");
    }
  };
  std::vector<std::uint64_t> out;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = number(spec.substr(0, dots));
    const std::uint64_t hi = number(spec.substr(dots + 2));
    if (hi < lo || hi - lo >= 100000) throw Error(ErrorKind::InvalidArgument, "seeds: bad range '" + spec + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "seeds: empty list");
  return out;
}

}  // namespace qdc::cli
