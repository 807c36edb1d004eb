#include "cli.hpp"

#include "infomenu/bench.hpp"
#include "infomenu/json_io.hpp"
#include "infomenu/menu_lp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using infomenu::Json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = INFOMENU_DATA_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "infomenu");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = infomenu::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string example(const std::string& name) { return (kData / "examples" / name).string(); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "infomenu_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(CliSolveExact, MatchingInstance) {
  const auto r = run({"solve-exact", example("matching.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json();
  EXPECT_EQ(j["command"], "solve-exact");
  EXPECT_EQ(j["seed"], 0);
  EXPECT_EQ(j["version"], INFOMENU_VERSION);
  EXPECT_NEAR(j["result"]["revenue"].get<double>(), 0.5, 1e-6);
  EXPECT_EQ(j["result"]["status"], "optimal");
  EXPECT_TRUE(j["result"]["violations"]["pass"].get<bool>());
  EXPECT_EQ(j["result"]["menu"]["entries"].size(), 1u);
}

TEST(CliSolveExact, CorpusInstanceMatchesManifest) {
  const Json manifest = infomenu::read_json_file((kData / "corpus_manifest.json").string());
  for (std::uint64_t seed : {5u, 22u, 47u, 91u}) {
    const Json& pinned = manifest["result"]["finite"][seed];
    const auto inst = infomenu::finite_corpus_instance(seed);
    const fs::path file = scratch("corpus-" + std::to_string(seed) + ".json");
    write(file, infomenu::to_json(inst).dump());
    const auto r = run({"solve-exact", file.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.json()["result"]["revenue"].get<double>(), pinned["r_menu"].get<double>(), 1e-7);
  }
}

TEST(CliSolveExact, MalformedAndInvalidInput) {
  const fs::path bad = scratch("bad.json");
  write(bad, "{\"states\": [");
  auto r = run({"solve-exact", bad.string()});
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("schema error"), std::string::npos);

  write(bad, R"({"states": ["w"], "prior": [1], "actions": ["a"], "type_dist": [1], "utilities": [[[0.5]]], "x": 1})");
  r = run({"solve-exact", bad.string()});
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("unknown field \"x\""), std::string::npos);

  write(bad, R"({"states": ["w"], "prior": [1], "actions": ["a"], "type_dist": [1], "utilities": [[[1.5]]]})");
  r = run({"solve-exact", bad.string()});
  EXPECT_EQ(r.code, 64);

  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"solve-exact"}).code, 64);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
}

TEST(CliSolveExact, ToleranceFromEnvironmentIsRecorded) {
  ::setenv("INFOMENU_SOLVER_TOL", "1e-7", 1);
  const auto r = run({"solve-exact", example("matching.json")});
  ::unsetenv("INFOMENU_SOLVER_TOL");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.json()["tolerances"]["solver"].get<double>(), 1e-7);
  const auto flag = run({"--solver-tol", "1e-9", "solve-exact", example("matching.json")});
  EXPECT_EQ(flag.json()["tolerances"]["solver"].get<double>(), 1e-9);
}

TEST(CliSolveExact, OutputIsByteIdenticalAcrossRuns) {
  const auto a = run({"--seed", "3", "solve-exact", example("three_state.json")});
  const auto b = run({"--seed", "3", "solve-exact", example("three_state.json")});
  EXPECT_EQ(a.out, b.out);
  const fs::path file = scratch("three_state_out.json");
  ASSERT_EQ(run({"--seed", "3", "-o", file.string(), "solve-exact", example("three_state.json")}).code, 0);
  std::ifstream in(file);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), a.out);
}

TEST(CliLazy, FixedSeedIsPinned) {
  // Pinned from a first run: 20 samples, realized w1, seed 7.
  const auto r = run({"--seed", "7", "lazy", example("matching.json"), "--type", "0", "--state", "w1", "-K", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json res = r.json()["result"];
  EXPECT_EQ(res["signal_label"], "a1");
  EXPECT_NEAR(res["price"].get<double>(), 0.35, 1e-6);
  EXPECT_EQ(res["transcript"]["samples"].size(), 20u);
  EXPECT_EQ(r.json()["seed"], 7);
  const auto again = run({"--seed", "7", "lazy", example("matching.json"), "--type", "0", "--state", "w1", "-K", "20"});
  EXPECT_EQ(again.out, r.out);
}

TEST(CliLazy, SingleSampleIsFree) {
  const auto r = run({"lazy", example("matching.json"), "--type", "0", "--sample-state", "-K", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.json()["result"]["price"].get<double>(), 0.0, 1e-7);
}

TEST(CliLazy, RejectsBadParameters) {
  EXPECT_EQ(run({"lazy", example("matching.json"), "--type", "0", "--state", "w1", "--epsilon", "0"}).code, 64);
  EXPECT_EQ(run({"lazy", example("matching.json"), "--type", "4", "--state", "w1"}).code, 64);
  EXPECT_EQ(run({"lazy", example("matching.json"), "--type", "0", "--state", "w9"}).code, 64);
  EXPECT_EQ(run({"lazy", example("matching.json"), "--type", "0"}).code, 64);
  EXPECT_EQ(run({"lazy", "--builtin", "circle", "--state", "0.5"}).code, 64);
}

TEST(CliLazy, BuiltinLineOracle) {
  const auto r = run({"lazy", "--builtin", "line", "--type", "1", "--state", "0.4", "--epsilon", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json res = r.json()["result"];
  EXPECT_EQ(res["realized_state"].get<double>(), 0.4);
  EXPECT_EQ(res["num_samples"].get<std::size_t>(), infomenu::sample_budget(2, 3, 0.5, 0.1));
}

TEST(CliLazyRevenue, IndependentOfWorkerCount) {
  const std::vector<std::string> base{"--seed", "5", "lazy-revenue", example("matching.json"), "-K", "40", "--trials", "30"};
  auto one = base, four = base;
  one.insert(one.end(), {"--workers", "1"});
  four.insert(four.end(), {"--workers", "4"});
  const auto a = run(one), b = run(four);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NEAR(a.json()["result"]["exact_revenue"].get<double>(), 0.5, 1e-6);
}

TEST(CliGaussian, OrthogonalPairTakesFullSurplus) {
  const auto r = run({"gaussian", example("orthogonal.json"), "--lift", "--check-surplus", "--grid-check", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json res = r.json()["result"];
  EXPECT_NEAR(res["revenue"].get<double>(), 2.5, 1e-12);
  EXPECT_TRUE(res["surplus"]["holds"].get<bool>());
  EXPECT_TRUE(res["surplus_check"]["consistent"].get<bool>());
  EXPECT_TRUE(res["grid_check"]["consistent"].get<bool>());
  for (const auto& e : res["lifted_menu"]["entries"]) EXPECT_NEAR(e["sigma2"].get<double>(), 0.0, 1e-12);
}

TEST(CliGaussian, CollinearPairFailsSeparation) {
  const auto r = run({"gaussian", example("collinear.json"), "--check-surplus"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json res = r.json()["result"];
  EXPECT_FALSE(res["surplus"]["holds"].get<bool>());
  EXPECT_NEAR(res["surplus"]["margin"].get<double>(), -2.0, 1e-15);
  EXPECT_NEAR(res["revenue"].get<double>(), 4.5, 1e-6);
}

TEST(CliGaussian, LiftNeedsEnoughDimensions) {
  const auto r = run({"gaussian", example("three_types_plane.json"), "--lift"});
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("d >= n"), std::string::npos);
}

TEST(CliBenchDiff, TwoTypesAndSweep) {
  const auto r = run({"bench-diff", "--n", "2", "--alpha", "0.1", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json rows = r.json()["result"]["rows"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0]["r_one"].get<double>(), 10.0, 1e-12);
  EXPECT_NEAR(rows[0]["r_menu"].get<double>(), 200.0 / 11.0, 1e-9);
  EXPECT_NEAR(rows[0]["ratio"].get<double>(), 0.55, 1e-12);
  EXPECT_TRUE(rows[0]["within_bound"].get<bool>());
  EXPECT_TRUE(rows[1]["ratio_bound"].is_null());
  EXPECT_TRUE(rows[1].contains("note"));

  const auto three = run({"bench-diff", "--n", "3", "--alpha", "0.05"});
  const Json row = three.json()["result"]["rows"][0];
  EXPECT_LE(row["ratio"].get<double>(), 1.0 / (3.0 * 0.95));
}

TEST(CliCheck, AcceptsSolverOutputAndCatchesTampering) {
  const fs::path menu = scratch("three_state_menu.json");
  ASSERT_EQ(run({"-o", menu.string(), "solve-exact", example("three_state.json")}).code, 0);
  auto r = run({"check", example("three_state.json"), menu.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json()["result"]["pass"].get<bool>());

  Json doc = infomenu::read_json_file(menu.string());
  Json bare = doc["result"]["menu"];
  bare["entries"][0]["price"] = bare["entries"][0]["price"].get<double>() + 0.1;
  write(menu, bare.dump());
  r = run({"check", example("three_state.json"), menu.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.json()["result"]["pass"].get<bool>());
}

TEST(CliCheck, GaussianMenus) {
  const fs::path menu = scratch("orth_menu.json");
  ASSERT_EQ(run({"-o", menu.string(), "gaussian", example("orthogonal.json")}).code, 0);
  EXPECT_EQ(run({"check", "--gaussian", example("orthogonal.json"), menu.string()}).code, 0);
  write(menu, R"({"entries": [{"v": [1, 0], "sigma2": 0, "price": 2}, {"v": [0, 1], "sigma2": 0, "price": 4}]})");
  EXPECT_EQ(run({"check", "--gaussian", example("orthogonal.json"), menu.string()}).code, 2);
}

TEST(CliCorpus, ManifestHashesAndRevenuesReproduce) {
  const Json manifest = infomenu::read_json_file((kData / "corpus_manifest.json").string());
  const auto r = run({"gen-corpus", "--count", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json fresh = r.json()["result"];
  const Json& pinned = manifest["result"];
  ASSERT_EQ(pinned["finite"].size(), 100u);
  ASSERT_EQ(pinned["gaussian"].size(), 100u);
  for (const char* family : {"finite", "gaussian"}) {
    for (std::size_t s = 0; s < 100; ++s) {
      const Json& a = pinned[family][s];
      const Json& b = fresh[family][s];
      EXPECT_EQ(a["hash"], b["hash"]) << family << " seed " << s;
      EXPECT_NEAR(a["r_menu"].get<double>(), b["r_menu"].get<double>(), 1e-7) << family << " seed " << s;
      EXPECT_NEAR(a["r_one"].get<double>(), b["r_one"].get<double>(), 1e-12);
    }
  }
}
