// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdc_cli/app.hpp"
#include "qdc_cli/builders.hpp"
#include "test_support.hpp"

namespace qdc::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "qdc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string tmp_path(const std::string& name) {
  const fs::path dir(QDC_TEST_TMPDIR);
  fs::create_directories(dir);
  return (dir / name).string();
}

// gen-state into a file; returns the path.
std::string gen_state(const std::string& name, std::vector<std::string> args) {
  const std::string path = tmp_path(name);
  args.insert(args.begin(), "gen-state");
  args.push_back("--out");
  args.push_back(path);
  const CliRun r = run(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  return path;
}

TEST(Cli, HelpVersionAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  const CliRun v = run({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_NE(v.out.find(version()), std::string::npos);
  EXPECT_EQ(run({"--bogus"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"gen-state", "nonsense"}).code, kExitUsage);
  EXPECT_EQ(run({"entropy", "--state", tmp_path("missing.json")}).code, kExitUsage);
  EXPECT_EQ(run({"decouple", "run", "--samples", "0"}).code, kExitUsage);
}

TEST(Cli, EntangledStateHasMinusOneConditionalMinEntropy) {
  const std::string s = gen_state("entangled1.json", {"entangled", "--k", "1"});
  const CliRun r = run({"entropy", "--state", s, "--kind", "hmin", "--target", "A", "--condition", "E"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = r.report();
  EXPECT_NEAR(j["results"]["value"].get<double>(), -1.0, 1e-6);
  EXPECT_EQ(j["config"]["command"], "entropy");
  EXPECT_TRUE(j.contains("timing"));
  EXPECT_TRUE(j.contains("version"));
}

TEST(Cli, ClassicalStateHasZeroConditionalMinEntropy) {
  const std::string s = gen_state("classical1.json", {"classical", "--k", "1"});
  const CliRun r = run({"entropy", "--state", s, "--kind", "hmin", "--target", "A", "--condition", "E"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(r.report()["results"]["value"].get<double>(), 0.0, 1e-6);
}

TEST(Cli, LemmaSuitesPass) {
  const CliRun r = run({"lemmas", "check", "--trials", "100", "--entropy-trials", "2", "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.report()["results"]["total_failures"].get<int>(), 0);
}

TEST(Cli, DecoupleRunWritesReportAndCsv) {
  const std::string s = gen_state("classical2.json", {"classical", "--k", "2"});
  const std::string csv = tmp_path("distances.csv");
  const std::string out = tmp_path("decouple.json");
  const CliRun r = run({"--out", out, "decouple", "run", "--state", s, "--channel", "id+trace:2,1", "--samples", "50",
                     "--seed", "3", "--csv", csv, "--no-smooth-bound"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  const json j = json::parse(in);
  const json& res = j["results"];
  EXPECT_TRUE(res["nonsmooth_holds"].get<bool>());
  EXPECT_EQ(res["per_sample_distances"].size(), 50u);
  EXPECT_TRUE(res["bound_smooth"].is_null());
  std::ifstream c(csv);
  int lines = 0;
  for (std::string line; std::getline(c, line);) ++lines;
  EXPECT_EQ(lines, 51);
}

// The "results" section does not depend on the worker count.
TEST(Cli, ResultsAreWorkerInvariant) {
  const std::string s = gen_state("random-mixed.json", {"random-mixed", "--dims", "A=2,E=2", "--seed", "4"});
  auto results = [&](const std::string& workers) {
    const CliRun r = run({"decouple", "run", "--state", s, "--channel", "id:1", "--samples", "64", "--seed", "9",
                       "--workers", workers, "--no-smooth-bound"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return r.report()["results"].dump();
  };
  EXPECT_EQ(results("1"), results("4"));

  const std::string p = gen_state("random-pure.json", {"random-pure", "--dims", "A=2,B=2,E=2", "--seed", "5"});
  auto merge = [&](const std::string& workers) {
    const CliRun r = run({"merge", "run", "--state", p, "--k", "4", "--l", "2", "--seeds", "0..2", "--mode", "exact",
                       "--workers", workers});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return r.report()["results"].dump();
  };
  EXPECT_EQ(merge("1"), merge("4"));
}

TEST(Cli, ConfigReplaysARun) {
  const std::string s = gen_state("independent.json", {"independent", "--k", "1"});
  const std::string first = tmp_path("first.json");
  ASSERT_EQ(run({"--out", first, "decouple", "run", "--state", s, "--channel", "meas:1", "--samples", "20", "--seed",
                 "2", "--no-smooth-bound"})
                .code,
            kExitOk);
  const CliRun replay = run({"--config", first, "decouple", "run"});
  ASSERT_EQ(replay.code, kExitOk) << replay.err;
  std::ifstream in(first);
  EXPECT_EQ(json::parse(in)["results"].dump(), replay.report()["results"].dump());
}

TEST(Cli, ConverseAndInvariantExitCodes) {
  const std::string s = gen_state("classical-conv.json", {"classical", "--k", "1"});
  const CliRun ok = run({"decouple", "converse", "--state", s, "--channel", "erase:1", "--eps", "0.001"});
  ASSERT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_TRUE(ok.report()["results"]["holds"].get<bool>());
  // eps below the measured distance violates a precondition of the check.
  const std::string e = gen_state("entangled-conv.json", {"entangled", "--k", "1"});
  EXPECT_NE(run({"decouple", "converse", "--state", e, "--channel", "id:1", "--eps", "0.01"}).code, kExitOk);
}

TEST(Cli, GenChannelRoundTrips) {
  const std::string path = tmp_path("channel.json");
  ASSERT_EQ(run({"--out", path, "gen-channel", "random", "--dim-in", "2", "--dim-out", "3", "--seed", "1"}).code, kExitOk);
  const Channel ch = load_channel(path);
  EXPECT_EQ(ch.dim_in(), 2);
  EXPECT_EQ(ch.dim_out(), 3);
  EXPECT_EQ(ch.trace_class(), TraceClass::TracePreserving);
  EXPECT_EQ(load_channel("id+trace:2,1").dim_out(), 2);
}

TEST(Config, JsonRoundTrip) {
  DecoupleConfig d;
  d.state = "s.json";
  d.channel = "id:2";
  d.input = {"A", "A2"};
  d.samples = 17;
  d.epsilon = 0.05;
  d.seed = 99;
  d.smooth_bound = false;
  DecoupleConfig back;
  from_json(json::parse(to_json(d).dump()), back);
  EXPECT_EQ(back, d);

  MergeConfig m;
  m.seeds = "3,5";
  m.k = 8;
  m.mode = "sampled";
  MergeConfig mb;
  from_json(to_json(m), mb);
  EXPECT_EQ(mb, m);

  GlobalConfig g;
  g.dim_cap = 64;
  g.tol.psd = 1e-7;
  GlobalConfig gb;
  from_json(to_json(g), gb);
  EXPECT_EQ(gb, g);
}

TEST(Config, ParseSeeds) {
  EXPECT_EQ(parse_seeds("0..3"), (std::vector<std::uint64_t>{0, 1, 2, 3}));
  EXPECT_EQ(parse_seeds("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(parse_seeds("4,2,9"), (std::vector<std::uint64_t>{4, 2, 9}));
  EXPECT_THROW(parse_seeds("3..1"), Error);
  EXPECT_THROW(parse_seeds("a"), Error);
  EXPECT_THROW(parse_seeds("-1"), Error);
  EXPECT_THROW(parse_seeds(""), Error);
}

TEST(Builders, TableOneStates) {
  EXPECT_NEAR(table1_state(Table1Kind::Entangled, 2).trace(), 1.0, 1e-12);
  EXPECT_EQ(table1_state(Table1Kind::Independent, 1, 3).dims().total(), 6);
  EXPECT_THROW(parse_dims("A=0"), Error);
  EXPECT_EQ(parse_dims("A=2,E=3").total(), 6);
}

}  // namespace
}  // namespace qdc::cli
