// front: command-line driver.
//
//   front run <config>       run the configured experiment
//   front validate <config>  parse and check a config, print its canonical form
//   front suite <config>     run all acceptance criteria on the config's medium
//
// --set key=value (repeatable) replaces a config entry. FRONT_WORKERS
// overrides the worker count when the config leaves it at 0.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rdfront/rdfront.hpp"

namespace {

std::vector<std::string> sets;

int load(const std::string& path, rdfront::ExperimentConfig& cfg) {
  try {
    std::vector<rdfront::ConfigOverride> overrides;
    for (const auto& s : sets) overrides.push_back(rdfront::parse_override(s));
    cfg = rdfront::load_config(path, overrides);
    return 0;
  } catch (const rdfront::ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
  }
  return 2;
}

int execute(const std::string& path, const std::string& output, bool suite) {
  rdfront::ExperimentConfig cfg;
  if (int rc = load(path, cfg)) return rc;
  if (!output.empty()) cfg.output = output;
  try {
    const auto outcome = rdfront::run_experiment(cfg, suite, &std::cout);
    for (const auto& f : outcome.failures) std::cerr << "failed: " << f << "\n";
    std::cout << (outcome.exit_code == 0 ? "all enabled checks passed" : "some checks failed")
              << " (results in " << cfg.output << ")\n";
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Front propagation in random media"};
  app.set_version_flag("--version", rdfront::version_string());
  app.require_subcommand(1);

  std::string path, output;
  auto* run = app.add_subcommand("run", "Run the experiment named in the config");
  run->add_option("config", path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Override the output directory");

  auto* validate = app.add_subcommand("validate", "Check a config and print its canonical form");
  validate->add_option("config", path, "Config file")->required()->check(CLI::ExistingFile);

  auto* suite = app.add_subcommand("suite", "Run the acceptance criteria");
  suite->add_option("config", path, "Config file")->required()->check(CLI::ExistingFile);
  suite->add_option("-o,--output", output, "Override the output directory");

  for (auto* sub : {run, validate, suite})
    sub->add_option("--set", sets, "Override a config entry (key=value), repeatable");

  CLI11_PARSE(app, argc, argv);

  if (*validate) {
    rdfront::ExperimentConfig cfg;
    if (int rc = load(path, cfg)) return rc;
    std::cout << cfg.canonical() << "sha256 = " << rdfront::sha256_hex(cfg.canonical()) << "\n";
    return 0;
  }
  return execute(path, output, static_cast<bool>(*suite));
}
