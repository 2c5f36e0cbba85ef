#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nscbf_app/runner.hpp"

int main(int argc, char** argv) {
  using namespace nscbf::app;

  CLI::App app{"Safe feedback synthesis with nonsmooth barrier functions"};
  app.require_subcommand(1);

  std::string scenario_path;
  RunOptions options;
  std::uint64_t seed = 0;
  double dt = 0.0, horizon = 0.0;
  std::vector<double> alphas;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--dt", dt, "Override the integrator step")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", horizon, "Override the horizon")->check(CLI::PositiveNumber);
    sub->add_option("--threads", options.threads, "Worker threads (0: all cores)")
        ->check(CLI::NonNegativeNumber);
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Closed-loop trajectories to CSV");
  CLI::App* verify = app.add_subcommand("verify", "Hypothesis and continuity probes");
  CLI::App* sweep = app.add_subcommand("sweep", "Continuity probe over smoothing windows");
  add_common(simulate);
  add_common(verify);
  add_common(sweep);
  sweep->add_option("--alphas", alphas, "Comma-separated alphas; 0 is the unsmoothed baseline")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
  CLI::App* active = app.get_subcommands().front();
  if (given(active, "--seed")) options.seed = seed;
  if (given(active, "--dt")) options.dt = dt;
  if (given(active, "--horizon")) options.horizon = horizon;
  if (active == sweep && given(sweep, "--alphas")) options.alphas = alphas;

  const Command command = active == simulate ? Command::kSimulate
                          : active == verify ? Command::kVerify
                                             : Command::kSweep;
  try {
    const Scenario scenario = with_overrides(parse_scenario(scenario_path), options);
    return run(command, scenario, options, std::cout);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::ordered_json{{"status", "error"},
                                        {"kind", "configuration"},
                                        {"message", e.what()}}
                     .dump()
              << "\n";
    return kExitConfig;
  }
}
