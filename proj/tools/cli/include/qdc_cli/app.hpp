// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qdc/decoupling.hpp"
#include "qdc/json_io.hpp"
#include "qdc/merging.hpp"

namespace qdc::cli {

/// Exit codes of the qdc tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitUsage = 2;

std::string version();

struct GlobalConfig {
  int dim_cap = 0;  ///< 0 keeps the library default
  Tolerances tol;
  bool operator==(const GlobalConfig& o) const;
};

struct EntropyConfig {
  std::string state;
  std::string kind = "hmin";  ///< vn, hmin, hmax, h2, hmin-smooth, hmax-smooth
  std::vector<std::string> target = {"A"};
  std::vector<std::string> condition;
  double epsilon = 0.0;
  bool optimize_sigma = false;
  bool operator==(const EntropyConfig&) const = default;
};

struct DecoupleConfig {
  std::string state;
  std::string channel;  ///< builder spec such as id+trace:4,1, or a channel JSON file
  std::vector<std::string> input = {"A"};
  int samples = 1000;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string stream = "decouple";
  int workers = 1;
  bool optimize_h2 = false;
  bool smooth_bound = true;
  std::string csv;
  bool operator==(const DecoupleConfig&) const = default;
};

struct ConverseConfig {
  std::string state;
  std::string channel;
  std::vector<std::string> input = {"A"};
  double eps = -1.0;   ///< negative: the measured distance, floored at 1e-6
  double eps1 = -1.0;  ///< negative: sqrt(eps)
  double eps2 = -1.0;  ///< negative: 0
  double eps3 = -1.0;  ///< negative: 2 sqrt(eps)
  bool operator==(const ConverseConfig&) const = default;
};

struct MergeConfig {
  std::string state;
  std::string a = "A";
  std::string b = "B";
  double epsilon = 0.3;
  std::string seeds = "0..19";
  int k = 0;  ///< 0: K and L from the achievable cost
  int l = 0;
  std::string mode = "auto";  ///< auto, exact, sampled
  int samples = 64;
  int workers = 1;
  bool operator==(const MergeConfig&) const = default;
};

struct LemmasConfig {
  std::uint64_t seed = 7;
  int trials = 200;
  int entropy_trials = 30;
  bool operator==(const LemmasConfig&) const = default;
};

struct GenStateConfig {
  std::string kind;  ///< independent, classical, entangled, random-mixed, random-pure
  int k = 1;
  std::string rho_e = "maximally-mixed";  ///< or pure
  int dim_e = 2;
  std::string dims = "A=2,E=2";
  int rank = 0;
  std::uint64_t seed = 0;
  bool operator==(const GenStateConfig&) const = default;
};

struct GenChannelConfig {
  std::string spec;  ///< builder spec, or "random"
  int dim_in = 2;
  int dim_out = 2;
  int rank = 2;
  std::uint64_t seed = 0;
  bool operator==(const GenChannelConfig&) const = default;
};

json to_json(const GlobalConfig& c);
json to_json(const EntropyConfig& c);
json to_json(const DecoupleConfig& c);
json to_json(const ConverseConfig& c);
json to_json(const MergeConfig& c);
json to_json(const LemmasConfig& c);
json to_json(const GenStateConfig& c);
json to_json(const GenChannelConfig& c);

/// Missing keys keep their defaults.
void from_json(const json& j, GlobalConfig& c);
void from_json(const json& j, EntropyConfig& c);
void from_json(const json& j, DecoupleConfig& c);
void from_json(const json& j, ConverseConfig& c);
void from_json(const json& j, MergeConfig& c);
void from_json(const json& j, LemmasConfig& c);
void from_json(const json& j, GenStateConfig& c);
void from_json(const json& j, GenChannelConfig& c);

/// Parses "0..19" or "3,5,8".
std::vector<std::uint64_t> parse_seeds(const std::string& spec);

/// Builder spec or path to a channel JSON file.
Channel load_channel(const std::string& spec);

// Report bodies. Everything here is deterministic for a fixed config; wall-clock data
// belongs in the report's "timing" member.
json decoupling_results(const DecouplingReport& r);
json converse_results(const ConverseReport& r);
json merging_results(const MergingSummary& s);
json lemma_results(const std::vector<LemmaCheck>& checks);

/// {version, config, seeds, results, timing}.
json make_report(json config, json seeds, json results, json timing);

/// Runs the tool. Reports go to --out when given, otherwise to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdc::cli
