// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qdc_cli/app.hpp"
#include "qdc_cli/builders.hpp"

namespace qdc::cli {

namespace {

// Raised for violated theorem checks and failed property suites.
struct InvariantFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Context {
  GlobalConfig global;
  std::string out_path;
  std::string config_path;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

void emit(const Context& ctx, const json& j) {
  if (ctx.out_path.empty()) {
    *ctx.out << j.dump(2) << "\n";
  } else {
    write_json_file(ctx.out_path, j);
  }
}

json command_config(const Context& ctx, const std::string& command, const json& options) {
  return json{{"command", command}, {"global", to_json(ctx.global)}, {"options", options}};
}

// With --config, command options and global settings come from the file.
template <class Config>
void load_config(Context& ctx, Config& cfg) {
  if (ctx.config_path.empty()) return;
  const json file = read_json_file(ctx.config_path);
  const json& c = file.contains("config") ? file.at("config") : file;
  cfg = Config{};
  from_json(c.contains("options") ? c.at("options") : c, cfg);
  if (c.contains("global")) from_json(c.at("global"), ctx.global);
}

void apply_global(const GlobalConfig& g) {
  set_tolerances(g.tol);
  if (g.dim_cap > 0) set_dimension_cap(g.dim_cap);
}

StateOperator load_state(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::InvalidArgument, "--state is required");
  return state_from_json(read_json_file(path));
}

json entropy_result_json(const std::string& kind, const EntropyResult& r) {
  json j{{"kind", kind},
         {"value", r.value},
         {"certificate_gap", r.certificate_gap},
         {"lower_bound", r.lower_bound},
         {"cross_check", r.cross_check}};
  j["optimizer_sigma"] = r.optimizer_sigma ? state_to_json(*r.optimizer_sigma) : json(nullptr);
  j["smoothed_state"] = r.smoothed_state ? state_to_json(*r.smoothed_state) : json(nullptr);
  return j;
}

int cmd_entropy(Context& ctx, EntropyConfig c) {
  load_config(ctx, c);
  apply_global(ctx.global);
  Stopwatch sw;
  const StateOperator st = load_state(c.state);
  EntropyResult r;
  if (c.kind == "vn") {
    r.value = von_neumann(st, c.target, c.condition);
  } else if (c.kind == "hmin") {
    r = h_min(st, c.target, c.condition);
  } else if (c.kind == "hmax") {
    r = h_max(st, c.target, c.condition);
  } else if (c.kind == "h2") {
    r = h2(st, c.target, c.condition, c.optimize_sigma);
  } else if (c.kind == "hmin-smooth") {
    r = h_min_smooth(st, c.target, c.condition, c.epsilon);
  } else if (c.kind == "hmax-smooth") {
    r = h_max_smooth(st, c.target, c.condition, c.epsilon);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown entropy kind '" + c.kind + "'");
  }
  emit(ctx, make_report(command_config(ctx, "entropy", to_json(c)), json::array(), entropy_result_json(c.kind, r),
                        json{{"wall_seconds", sw.seconds()}}));
  return kExitOk;
}

void write_csv(const std::string& path, const std::vector<double>& d) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  f << "index,distance\n" << std::setprecision(17);
  for (std::size_t i = 0; i < d.size(); ++i) f << i << "," << d[i] << "\n";
}

int cmd_decouple_run(Context& ctx, DecoupleConfig c, int cli_workers) {
  load_config(ctx, c);
  if (cli_workers > 0) c.workers = cli_workers;
  apply_global(ctx.global);
  Stopwatch sw;
  DecouplingExperiment exp;
  exp.state = load_state(c.state);
  exp.a = c.input;
  exp.channel = load_channel(c.channel);
  exp.num_samples = c.samples;
  exp.epsilon = c.epsilon;
  exp.seed = RngSeed{c.seed, c.stream};
  exp.workers = c.workers;
  exp.optimize_h2 = c.optimize_h2;
  exp.smooth_bound = c.smooth_bound;
  const DecouplingReport r = run(exp);
  if (!c.csv.empty()) write_csv(c.csv, r.per_sample_distances);
  json results = decoupling_results(r);
  emit(ctx, make_report(command_config(ctx, "decouple run", to_json(c)), json{{"seed", c.seed}, {"stream", c.stream}},
                        results, json{{"wall_seconds", sw.seconds()}}));
  if (!r.bound_error.empty()) throw InvariantFailure("bound computation failed: " + r.bound_error);
  if (!results["nonsmooth_holds"].get<bool>()) throw InvariantFailure("empirical mean exceeds the non-smooth bound");
  if (results["smooth_holds"].is_boolean() && !results["smooth_holds"].get<bool>())
    throw InvariantFailure("empirical mean exceeds the smooth bound");
  return kExitOk;
}

int cmd_decouple_converse(Context& ctx, ConverseConfig c) {
  load_config(ctx, c);
  apply_global(ctx.global);
  Stopwatch sw;
  const StateOperator st = load_state(c.state);
  const Channel ch = load_channel(c.channel);
  const double eps = c.eps >= 0.0 ? c.eps : std::max(decoupling_distance(st, c.input, ch), 1e-6);
  ConverseParams p = ConverseParams::defaults(eps);
  if (c.eps1 >= 0.0) p.eps1 = c.eps1;
  if (c.eps2 >= 0.0) p.eps2 = c.eps2;
  if (c.eps3 >= 0.0) p.eps3 = c.eps3;
  const ConverseReport r = converse_check(st, c.input, ch, p);
  json results = converse_results(r);
  results["params"] = {{"eps", p.eps}, {"eps1", p.eps1}, {"eps2", p.eps2}, {"eps3", p.eps3}};
  emit(ctx, make_report(command_config(ctx, "decouple converse", to_json(c)), json::array(), results,
                        json{{"wall_seconds", sw.seconds()}}));
  if (!r.holds) throw InvariantFailure("converse inequality violated");
  return kExitOk;
}

MergingMode parse_mode(const std::string& m) {
  if (m == "auto") return MergingMode::Auto;
  if (m == "exact") return MergingMode::Exact;
  if (m == "sampled") return MergingMode::Sampled;
  throw Error(ErrorKind::InvalidArgument, "unknown merging mode '" + m + "'");
}

int cmd_merge_run(Context& ctx, MergeConfig c, int cli_workers) {
  load_config(ctx, c);
  if (cli_workers > 0) c.workers = cli_workers;
  apply_global(ctx.global);
  Stopwatch sw;
  const StateOperator st = load_state(c.state);
  std::string purifier = "E";
  while (st.dims().has(purifier)) purifier += "'";
  MergingInstance in;
  in.psi = pure_from_state(st, purifier);
  in.a = c.a;
  in.b = c.b;
  in.epsilon_target = c.epsilon;
  in.mode = parse_mode(c.mode);
  in.samples = c.samples;
  in.workers = c.workers;
  in.seed.stream = "merge";
  const bool from_bound = c.k == 0 && c.l == 0;
  if (from_bound) {
    const CostBound cb = cost_achievable(reduce_to(in.psi.density(), {c.a}, {c.b}), {c.a}, {c.b}, c.epsilon);
    in.k = 1 << cb.kappa;
    in.l = 1 << cb.ell;
  } else {
    in.k = c.k;
    in.l = c.l;
  }
  const auto seeds = parse_seeds(c.seeds);
  const MergingSummary s = run_merging_seeds(in, seeds);
  json results = merging_results(s);
  results["k"] = in.k;
  results["l"] = in.l;
  const double floor = 1.0 - 0.5 * c.epsilon * c.epsilon - 3.0 * s.std_error;
  results["fidelity_floor"] = floor;
  emit(ctx, make_report(command_config(ctx, "merge run", to_json(c)), json(seeds), results,
                        json{{"wall_seconds", sw.seconds()}}));
  for (const auto& r : s.runs) {
    if (!r.sampled && std::abs(r.probability_sum - 1.0) > 1e-9)
      throw InvariantFailure("outcome probabilities do not sum to 1");
    if (r.bound_converse && *r.bound_converse > r.cost_bits + 1e-6)
      throw InvariantFailure("realized cost is below the converse bound");
  }
  if (from_bound && s.mean_fidelity < floor) throw InvariantFailure("mean fidelity below 1 - eps^2/2");
  return kExitOk;
}

int cmd_lemmas(Context& ctx, LemmasConfig c) {
  load_config(ctx, c);
  apply_global(ctx.global);
  Stopwatch sw;
  const auto proof = verify_proof_lemmas(c.seed, c.trials);
  const auto ent = verify_entropy_lemmas(c.seed, c.entropy_trials);
  int failures = 0;
  json seconds = json::object();
  for (const auto* group : {&proof, &ent})
    for (const auto& l : *group) {
      failures += l.failures;
      seconds[l.name] = l.seconds;
      if (l.failures > 0) *ctx.err << "lemma " << l.name << ": " << l.failures << " failures, " << l.first_failure << "\n";
    }
  json results{{"proof", lemma_results(proof)}, {"entropy", lemma_results(ent)}, {"total_failures", failures}};
  emit(ctx, make_report(command_config(ctx, "lemmas check", to_json(c)), json{{"seed", c.seed}}, results,
                        json{{"wall_seconds", sw.seconds()}, {"checks", seconds}}));
  if (failures > 0) throw InvariantFailure("lemma checks failed");
  return kExitOk;
}

int cmd_gen_state(Context& ctx, GenStateConfig c) {
  load_config(ctx, c);
  apply_global(ctx.global);
  StateOperator st;
  if (c.kind == "independent") {
    if (c.rho_e != "maximally-mixed" && c.rho_e != "pure")
      throw Error(ErrorKind::InvalidArgument, "--rhoE must be maximally-mixed or pure");
    st = table1_state(Table1Kind::Independent, c.k, c.dim_e, c.rho_e == "pure");
  } else if (c.kind == "classical") {
    st = table1_state(Table1Kind::Classical, c.k);
  } else if (c.kind == "entangled") {
    st = table1_state(Table1Kind::Entangled, c.k);
  } else if (c.kind == "random-mixed") {
    st = random_mixed_state(parse_dims(c.dims), c.rank, c.seed);
  } else if (c.kind == "random-pure") {
    st = random_pure_state(parse_dims(c.dims), c.seed);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown state kind '" + c.kind + "'");
  }
  emit(ctx, state_to_json(st));
  return kExitOk;
}

int cmd_gen_channel(Context& ctx, GenChannelConfig c) {
  load_config(ctx, c);
  apply_global(ctx.global);
  Channel ch;
  if (c.spec == "random") {
    auto rng = make_rng(RngSeed{c.seed, "gen-channel"}, 0);
    ch = random_tpcpm(c.dim_in, c.dim_out, c.rank, rng);
  } else {
    ch = channel_from_spec(c.spec);
  }
  emit(ctx, channel_to_json(ch));
  return kExitOk;
}

template <class T>
CLI::Option* opt(CLI::App* app, const std::string& name, T& field, const std::string& help) {
  return app->add_option(name, field, help)->capture_default_str();
}

}  // namespace

Channel load_channel(const std::string& spec) {
  if (spec.empty()) throw Error(ErrorKind::InvalidArgument, "--channel is required");
  if (std::ifstream(spec).good()) return channel_from_json(read_json_file(spec));
  return channel_from_spec(spec);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;

  CLI::App app{"Numerics for one-shot decoupling and quantum state merging.", "qdc"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  opt(&app, "--dim-cap", ctx.global.dim_cap, "Total dimension cap; 0 keeps 256 or $QDC_DIM_CAP");
  opt(&app, "--tol-herm", ctx.global.tol.herm, "Hermiticity tolerance, relative to the operator norm");
  opt(&app, "--tol-psd", ctx.global.tol.psd, "Allowed negative eigenvalue, relative to the operator norm");
  opt(&app, "--tol-trace", ctx.global.tol.trace, "Slack on tr rho <= 1");
  opt(&app, "--tol-pinv", ctx.global.tol.pinv, "Generalized-inverse cutoff, relative to lambda_max");
  opt(&app, "--tol-kraus", ctx.global.tol.kraus, "Choi eigenvalues at or below this are dropped");
  app.add_option("--out", ctx.out_path, "Write the JSON output here instead of standard output");
  app.add_option("--config", ctx.config_path,
                 "Take command options and global settings from a report or config JSON file");

  std::function<int()> action;
  int workers = 0;

  EntropyConfig ec;
  auto* ent = app.add_subcommand("entropy", "Conditional entropies of a state");
  opt(ent, "--state", ec.state, "State JSON file");
  opt(ent, "--kind", ec.kind, "vn, hmin, hmax, h2, hmin-smooth or hmax-smooth")
      ->check(CLI::IsMember({"vn", "hmin", "hmax", "h2", "hmin-smooth", "hmax-smooth"}));
  opt(ent, "--target", ec.target, "Target subsystem labels");
  opt(ent, "--condition", ec.condition, "Conditioning subsystem labels");
  opt(ent, "--epsilon", ec.epsilon, "Smoothing parameter");
  ent->add_flag("--optimize-sigma", ec.optimize_sigma, "Optimize sigma_B in H2");
  ent->callback([&] { action = [&] { return cmd_entropy(ctx, ec); }; });

  auto* dec = app.add_subcommand("decouple", "Decoupling experiments");
  dec->require_subcommand(1, 1);
  DecoupleConfig dc;
  auto* dec_run = dec->add_subcommand("run", "Haar-averaged decoupling distance against both bounds");
  opt(dec_run, "--state", dc.state, "State JSON file on the input and reference systems");
  opt(dec_run, "--channel", dc.channel, "Channel spec (id:m, meas:m, erase:m, id+meas:m,m', id+trace:m,m') or JSON file");
  opt(dec_run, "--input", dc.input, "Labels of the scrambled input subsystems");
  opt(dec_run, "--samples", dc.samples, "Number of Haar samples")->check(CLI::PositiveNumber);
  opt(dec_run, "--epsilon", dc.epsilon, "Smoothing parameter of the smooth bound")->check(CLI::Range(0.0, 0.999));
  opt(dec_run, "--seed", dc.seed, "Experiment seed");
  opt(dec_run, "--stream", dc.stream, "Random stream name");
  opt(dec_run, "--workers", workers, "Worker threads; results do not depend on it");
  dec_run->add_flag("--optimize-h2", dc.optimize_h2, "Optimize sigma in the collision entropies");
  dec_run->add_flag("!--no-smooth-bound", dc.smooth_bound, "Skip the min-entropy SDPs of the smooth bound");
  opt(dec_run, "--csv", dc.csv, "Write per-sample distances as CSV");
  dec_run->callback([&] { action = [&] { return cmd_decouple_run(ctx, dc, workers); }; });

  ConverseConfig cc;
  auto* dec_conv = dec->add_subcommand("converse", "Check the converse inequality on one instance");
  opt(dec_conv, "--state", cc.state, "State JSON file");
  opt(dec_conv, "--channel", cc.channel, "Channel spec or JSON file");
  opt(dec_conv, "--input", cc.input, "Labels of the channel input subsystems");
  opt(dec_conv, "--eps", cc.eps, "Decoupling accuracy; negative uses the measured distance");
  opt(dec_conv, "--eps1", cc.eps1, "Negative uses sqrt(eps)");
  opt(dec_conv, "--eps2", cc.eps2, "Negative uses 0");
  opt(dec_conv, "--eps3", cc.eps3, "Negative uses 2 sqrt(eps)");
  dec_conv->callback([&] { action = [&] { return cmd_decouple_converse(ctx, cc); }; });

  auto* merge = app.add_subcommand("merge", "State merging");
  merge->require_subcommand(1, 1);
  MergeConfig mc;
  auto* merge_run = merge->add_subcommand("run", "Run the merging protocol over several seeds");
  opt(merge_run, "--state", mc.state, "State JSON file; mixed states are purified onto a new label");
  opt(merge_run, "--a", mc.a, "Label of Alice's system");
  opt(merge_run, "--b", mc.b, "Label of Bob's system");
  opt(merge_run, "--epsilon", mc.epsilon, "Target error")->check(CLI::Range(0.0, 0.999));
  opt(merge_run, "--seeds", mc.seeds, "Seed range a..b or comma list");
  opt(merge_run, "--k", mc.k, "Schmidt rank K of the initial entanglement; 0 derives K, L from the cost bound");
  opt(merge_run, "--l", mc.l, "Schmidt rank L of the output entanglement");
  opt(merge_run, "--mode", mc.mode, "auto, exact or sampled")->check(CLI::IsMember({"auto", "exact", "sampled"}));
  opt(merge_run, "--samples", mc.samples, "Outcome blocks per run in sampled mode");
  opt(merge_run, "--workers", workers, "Worker threads; results do not depend on it");
  merge_run->callback([&] { action = [&] { return cmd_merge_run(ctx, mc, workers); }; });

  auto* lem = app.add_subcommand("lemmas", "Randomized lemma checks");
  lem->require_subcommand(1, 1);
  LemmasConfig lc;
  auto* lem_check = lem->add_subcommand("check", "Run the property suites");
  opt(lem_check, "--seed", lc.seed, "Seed");
  opt(lem_check, "--trials", lc.trials, "Trials per algebraic check")->check(CLI::NonNegativeNumber);
  opt(lem_check, "--entropy-trials", lc.entropy_trials, "Trials per SDP-backed check")->check(CLI::NonNegativeNumber);
  lem_check->callback([&] { action = [&] { return cmd_lemmas(ctx, lc); }; });

  GenStateConfig gs;
  auto* gen_state = app.add_subcommand("gen-state", "Write a state JSON file");
  gen_state->add_option("kind", gs.kind, "independent, classical, entangled, random-mixed or random-pure")
      ->required()
      ->check(CLI::IsMember({"independent", "classical", "entangled", "random-mixed", "random-pure"}));
  opt(gen_state, "--k", gs.k, "Number of qubits of A for the first three kinds");
  opt(gen_state, "--rhoE", gs.rho_e, "maximally-mixed or pure, for independent");
  opt(gen_state, "--dim-e", gs.dim_e, "Dimension of E for independent");
  opt(gen_state, "--dims", gs.dims, "LABEL=DIM list for the random kinds");
  opt(gen_state, "--rank", gs.rank, "Rank for random-mixed; 0 is full rank");
  opt(gen_state, "--seed", gs.seed, "Seed for the random kinds");
  gen_state->callback([&] { action = [&] { return cmd_gen_state(ctx, gs); }; });

  GenChannelConfig gc;
  auto* gen_channel = app.add_subcommand("gen-channel", "Write a channel JSON file");
  gen_channel->add_option("spec", gc.spec, "Builder spec such as id+trace:4,1, or random")->required();
  opt(gen_channel, "--dim-in", gc.dim_in, "Input dimension for random");
  opt(gen_channel, "--dim-out", gc.dim_out, "Output dimension for random");
  opt(gen_channel, "--rank", gc.rank, "Kraus rank for random");
  opt(gen_channel, "--seed", gc.seed, "Seed for random");
  gen_channel->callback([&] { action = [&] { return cmd_gen_channel(ctx, gc); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const Tolerances saved_tol = tolerances();
  const int saved_cap = dimension_cap();
  int code = kExitOk;
  try {
    code = action ? action() : kExitUsage;
  } catch (const InvariantFailure& e) {
    err << "qdc: " << e.what() << "\n";
    code = kExitInvariant;
  } catch (const Error& e) {
    err << "qdc: " << e.what() << "\n";
    code = e.kind() == ErrorKind::Solver ? kExitInvariant : kExitUsage;
  } catch (const std::exception& e) {
    err << "qdc: " << e.what() << "\n";
    code = kExitUsage;
  }
  set_tolerances(saved_tol);
  set_dimension_cap(saved_cap);
  return code;
}

}  // namespace qdc::cli
