#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "rdfront/experiments.hpp"

using namespace rdfront;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "[run]\n"
    "experiment = tw-speed\n"
    "[nonlinearity]\n"
    "theta0 = 0.25\n"
    "[medium]\n"
    "g = 1\n";

std::string message_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rdfront_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// every file except the manifest, which carries wall-clock times
std::map<std::string, std::string> result_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "manifest.json") out[e.path().filename().string()] = slurp(e.path());
  return out;
}

}  // namespace

TEST(ParseConfig, MinimalConfigTakesDefaults) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.experiment, ExperimentKind::kTwSpeed);
  EXPECT_EQ(cfg.g_min, 1.0);
  EXPECT_EQ(cfg.g_max, 1.0);
  EXPECT_EQ(cfg.theta0, 0.25);
  EXPECT_EQ(cfg.grid.dx, GridConfig{}.dx);
  EXPECT_EQ(cfg.n_list, (std::vector<int>{5, 10, 20, 40, 80}));
  EXPECT_DOUBLE_EQ(cfg.level_k(), 0.25);
  EXPECT_FALSE(cfg.checks.has_value());
}

TEST(ParseConfig, ConstraintViolationNamesTheConstraint) {
  const auto msg = message_of("experiment = speed\ng_min = 2\ng_max = 1\n");
  EXPECT_NE(msg.find("g_min <= g_max"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(ParseConfig, DuplicateKeyCitesBothLines) {
  const auto msg = message_of("experiment = speed\n\nT = 10\n# comment\nT = 20\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
  EXPECT_NE(message_of("experiment = speed\ng = 1\ng_min = 1\n").find("duplicate"), std::string::npos);
}

TEST(ParseConfig, FirstInvalidLineIsReported) {
  struct Case {
    const char* text;
    const char* needle;
  };
  const Case cases[] = {
      {"experiment = speed\nbogus = 1\n", "line 2: unknown key 'bogus'"},
      {"experiment = speed\nT = ten\n", "line 2"},
      {"experiment = warp\n", "unknown experiment"},
      {"[nowhere]\n", "unknown section"},
      {"[grid]\nexperiment = speed\n", "belongs to section [run]"},
      {"experiment = speed\njust words\n", "key = value"},
      {"T = 10\n", "missing required key 'experiment'"},
      {"experiment = speed\ntheta0 = 1.5\n", "theta0"},
      {"experiment = speed\ndt = 0.9\n", "dt*K*g_max < 1"},
      {"experiment = wave\nn_list = 5, 20, 10\n", "increasing"},
      {"experiment = speed\nchecks = 1, 13\n", "line 2"},
  };
  for (const auto& c : cases) {
    const auto msg = message_of(c.text);
    EXPECT_NE(msg.find(c.needle), std::string::npos) << c.text << " -> " << msg;
  }
}

TEST(ParseConfig, ChecksKey) {
  auto cfg = parse_config(std::string(kMinimal) + "[run]\nchecks = 3, 1\n");
  ASSERT_TRUE(cfg.checks);
  EXPECT_EQ(*cfg.checks, (std::vector<int>{3, 1}));
  cfg = parse_config(std::string(kMinimal) + "[run]\nchecks = none\n");
  ASSERT_TRUE(cfg.checks);
  EXPECT_TRUE(cfg.checks->empty());
}

TEST(ParseConfig, OverridesReplaceFileEntries) {
  const auto cfg = parse_config(std::string(kMinimal) + "[experiment]\nT = 10\n",
                                {parse_override("T=25"), parse_override("g_max = 1")});
  EXPECT_EQ(cfg.T, 25.0);
  EXPECT_EQ(cfg.g_max, 1.0);
  EXPECT_THROW(parse_config(kMinimal, {parse_override("nope=1")}), ConfigError);
  EXPECT_THROW(parse_config(kMinimal, {parse_override("g_min=3")}), ConfigError);
  EXPECT_THROW(parse_config(kMinimal, {parse_override("T=1"), parse_override("T=2")}), ConfigError);
  EXPECT_THROW(parse_override("T"), ConfigError);
}

TEST(Canonical, HashIgnoresOutputAndWorkers) {
  const auto a = parse_config(std::string(kMinimal) + "[run]\noutput = here\nworkers = 3\n");
  const auto b = parse_config(std::string(kMinimal) + "[run]\noutput = there\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  const auto c = parse_config(std::string(kMinimal) + "[experiment]\nT = 201\n");
  EXPECT_NE(sha256_hex(a.canonical()), sha256_hex(c.canonical()));
  EXPECT_EQ(a.canonical().find("output"), std::string::npos);
  EXPECT_NE(a.canonical().find("experiment.T = "), std::string::npos);
}

TEST(Canonical, OrderOfTheFileDoesNotMatter) {
  const auto a = parse_config("experiment = speed\nT = 50\ng_min = 1.5\n");
  const auto b = parse_config("g_min = 1.5\n[experiment]\nT = 50\n[run]\nexperiment = speed\n");
  EXPECT_EQ(a.canonical(), b.canonical());
}

TEST(Io, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, RealsRoundTripThroughText) {
  testgen::Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.integer(-60, 60)));
    EXPECT_EQ(std::strtod(format_real(v).c_str(), nullptr), v);
  }
}

TEST(Io, CsvLayout) {
  const auto dir = scratch("csv");
  fs::create_directories(dir);
  {
    CsvWriter w(dir / "a.csv", {"x", "value"});
    w.row({0.5, 1.0});
    w.row({-2.0, 0.1});
  }
  EXPECT_EQ(slurp(dir / "a.csv"), "x,value\n0.5,1\n-2,0.10000000000000001\n");
  fs::remove_all(dir);
}

TEST(RunExperiment, TwSpeedIsByteReproducible) {
  auto cfg = parse_config(kMinimal);
  cfg.output = scratch("tw1").string();
  const auto a = run_experiment(cfg);
  const auto first = result_files(cfg.output);
  fs::remove_all(cfg.output);
  cfg.output = scratch("tw2").string();
  const auto b = run_experiment(cfg);
  EXPECT_EQ(first, result_files(cfg.output));
  EXPECT_EQ(a.exit_code, 0) << (a.failures.empty() ? "" : a.failures.front());
  EXPECT_TRUE(first.count("speeds.ndjson"));
  EXPECT_TRUE(first.count("acceptance.json"));

  const auto manifest = json::parse(slurp(fs::path(cfg.output) / "manifest.json"));
  EXPECT_EQ(manifest["config_hash"], sha256_hex(cfg.canonical()));
  EXPECT_EQ(manifest["status"], "complete");
  const auto acc = json::parse(first.at("acceptance.json"));
  EXPECT_EQ(acc["criteria"].size(), 12u);
  EXPECT_EQ(acc["criteria"][0]["status"], "pass");
  EXPECT_EQ(acc["criteria"][1]["status"], "not-run");
  fs::remove_all(cfg.output);
}

TEST(RunExperiment, SpeedResultsIndependentOfWorkerCount) {
  auto cfg = parse_config(
      "experiment = speed\nchecks = none\n[medium]\nrealizations = 16\n[experiment]\nN = 20\nstride = 10\nT = 20\n");
  std::map<std::string, std::string> files[2];
  const int workers[2] = {1, 8};
  for (int i = 0; i < 2; ++i) {
    cfg.workers = workers[i];
    cfg.output = scratch("speed" + std::to_string(i)).string();
    const auto out = run_experiment(cfg);
    EXPECT_EQ(out.exit_code, 0) << (out.failures.empty() ? "" : out.failures.front());
    files[i] = result_files(cfg.output);
    fs::remove_all(cfg.output);
  }
  EXPECT_EQ(files[0], files[1]);
  EXPECT_TRUE(files[0].count("hitting_times.csv"));
}

TEST(RunExperiment, InvariantSuiteOnHomogeneousDefaultsPasses) {
  auto cfg = parse_config("experiment = invariant-suite\n[medium]\nmedium = homogeneous\ng = 1\n");
  cfg.output = scratch("inv").string();
  const auto out = run_experiment(cfg);
  EXPECT_EQ(out.exit_code, 0) << (out.failures.empty() ? "" : out.failures.front());
  const auto acc = json::parse(slurp(fs::path(cfg.output) / "acceptance.json"));
  EXPECT_EQ(acc["criteria"][10]["status"], "pass");
  EXPECT_EQ(acc["criteria"][11]["status"], "pass");
  fs::remove_all(cfg.output);
}

TEST(RunExperiment, FailureIsRecordedInTheManifest) {
  // c_plus far above the true speed leaves the inner cone unfilled
  auto cfg = parse_config(
      "experiment = spreading-theorem\nchecks = none\n[medium]\nmedium = homogeneous\ng = 1\nrealizations = 1\n"
      "[experiment]\nT = 40\nc_plus = 2\n");
  cfg.output = scratch("fail").string();
  const auto out = run_experiment(cfg);
  EXPECT_EQ(out.exit_code, 1);
  const auto manifest = json::parse(slurp(fs::path(cfg.output) / "manifest.json"));
  EXPECT_EQ(manifest["status"], "failed");
  EXPECT_FALSE(manifest["failures"].empty());
  EXPECT_TRUE(fs::exists(fs::path(cfg.output) / "spreading.ndjson"));
  fs::remove_all(cfg.output);
}
