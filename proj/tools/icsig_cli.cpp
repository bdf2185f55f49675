// Experiment front end: runs sweep specs and the installation self-check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "icsig/experiment.hpp"
#include "icsig/selftest.hpp"

namespace fs = std::filesystem;

namespace {

int run_command(const std::string& spec_path, int jobs, long long seed_override,
                const std::string& out_dir) {
  nlohmann::json j;
  {
    std::ifstream in(spec_path);
    if (!in.good()) {
      std::cerr << "error: cannot open spec file '" << spec_path << "'\n";
      return 2;
    }
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << spec_path << " is not valid JSON: " << e.what() << "\n";
      return 2;
    }
  }
  icsig::ExperimentSpec spec;
  try {
    if (seed_override >= 0) j["seed"] = static_cast<std::uint64_t>(seed_override);
    spec = icsig::ExperimentSpec::from_json(j);
  } catch (const icsig::ConfigError& e) {
    std::cerr << "error: invalid spec: " << e.what() << "\n";
    return 2;
  }

  std::cout << "running " << spec_path << " (seed " << spec.seed << ", jobs " << jobs
            << ")\n";
  const icsig::SweepResult result = icsig::sweep(spec, jobs);

  const fs::path out_base = fs::path(out_dir) / fs::path(spec.output).filename();
  fs::create_directories(out_base.parent_path().empty() ? fs::path(".")
                                                        : out_base.parent_path());
  {
    std::ofstream out(out_base);
    out << icsig::to_csv(result.rows);
  }
  {
    std::ofstream meta(out_base.string() + ".meta.json");
    meta << icsig::run_metadata(spec, result).dump(2) << "\n";
  }
  std::printf("wrote %s (%zu rows, %.1fs)\n", out_base.string().c_str(),
              result.rows.size(), result.wall_seconds);
  if (result.failures > 0) {
    std::fprintf(stderr, "warning: %d point(s) failed; rows kept with failed=1\n",
                 result.failures);
    return 1;
  }
  return 0;
}

int verify_command(const std::string& data_dir, bool quick) {
  const std::vector<icsig::CheckResult> checks =
      icsig::run_verification(data_dir, quick);
  int failures = 0;
  std::printf("%-24s %-6s %8s  %s\n", "check", "result", "time", "detail");
  for (const icsig::CheckResult& check : checks) {
    std::printf("%-24s %-6s %7.2fs  %s\n", check.name.c_str(),
                check.pass ? "PASS" : "FAIL", check.seconds, check.detail.c_str());
    if (!check.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"improper-signaling precoder designs for the K-user interference "
               "channel: experiment runner"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir = ".";
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;
  long long seed_override = -1;

  CLI::App* run = app.add_subcommand("run", "run an experiment spec (JSON)");
  run->add_option("spec", spec_path, "path to the spec file")->required();
  run->add_option("--jobs", jobs, "worker threads");
  run->add_option("--seed", seed_override, "override the spec's RNG seed");
  run->add_option("--out", out_dir, "output directory");

  bool quick = false;
  std::string data_dir = std::string(ICSIG_DATA_DIR) + "/tests/golden";
  CLI::App* verify = app.add_subcommand("verify", "run the fast oracle suite");
  verify->add_flag("--quick", quick, "smaller Monte Carlo budgets (< 1 min)");
  verify->add_option("--data", data_dir, "directory holding the golden files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(spec_path, jobs, seed_override, out_dir);
    return verify_command(data_dir, quick);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
