// Command line front end: run | sweep | validate.
//
// Exit codes: 0 success, 1 validation failure or I/O error, 2 bad
// configuration or arguments, 3 collision.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "onramp/config.h"
#include "onramp/report.h"
#include "onramp/simulation.h"
#include "onramp/validation.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCollision = 3;

struct CommonFlags {
  std::string config_path;
  std::string scenario;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
};

void AddCommonFlags(CLI::App* app, CommonFlags& flags) {
  app->add_option("--config", flags.config_path, "key = value config file");
  app->add_option("--scenario", flags.scenario,
                  "canonical cell, e.g. medium_high_ramp");
  app->add_option("--strategy", flags.strategy,
                  "priority | distance | velocity | proactive_velocity");
  app->add_option("--seed", flags.seed, "RNG seed");
  app->add_option("--duration-s", flags.duration, "simulated seconds");
}

onramp::ScenarioConfig LoadConfig(const CommonFlags& flags) {
  onramp::ScenarioConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) {
      throw onramp::ConfigError("", "cannot read " + flags.config_path);
    }
    std::stringstream text;
    text << in.rdbuf();
    config = onramp::ParseConfig(text.str());
  }
  if (!flags.scenario.empty()) {
    auto cell = onramp::CanonicalScenario(flags.scenario, config);
    if (!cell) {
      throw onramp::ConfigError("", "unknown scenario '" + flags.scenario + "'");
    }
    config = *cell;
  }
  if (flags.strategy) onramp::SetConfigValue(config, "strategy", *flags.strategy);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.duration) {
    onramp::SetConfigValue(config, "duration_s",
                           onramp::FormatDouble(*flags.duration));
  }
  config.Validate();
  return config;
}

std::vector<double> ParseValues(const std::string& list) {
  std::vector<double> values;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) {
      throw onramp::ConfigError("", "bad value '" + item + "' in --values");
    }
    values.push_back(v);
  }
  if (values.empty()) throw onramp::ConfigError("", "--values is empty");
  return values;
}

void PrintCollision(const onramp::CollisionInfo& c) {
  std::cerr << "collision: car " << c.follower << " hit car " << c.leader
            << " at t = " << c.time << " s (gap " << c.gap << " m)\n";
}

int Run(const CommonFlags& flags, const std::string& out) {
  const onramp::ScenarioConfig config = LoadConfig(flags);
  const onramp::RunResult result = onramp::RunScenario(config);
  const auto artifact = onramp::WriteRunArtifact(result, out);
  std::cout << "merged " << result.summary.total_throughput << " of "
            << result.arrivals << " ramp arrivals; artifacts in "
            << artifact.frames_path.parent_path().string() << '\n';
  if (result.collision) {
    PrintCollision(*result.collision);
    return kExitCollision;
  }
  return 0;
}

int Sweep(const CommonFlags& flags, const std::string& out,
          const std::string& vary, const std::string& values,
          unsigned jobs) {
  onramp::SweepSpec spec;
  spec.base = LoadConfig(flags);
  const auto parameter = onramp::ParseSweepParameter(vary);
  if (!parameter) {
    throw onramp::ConfigError("", "cannot vary '" + vary + "'");
  }
  spec.varied = *parameter;
  spec.values = ParseValues(values);
  if (flags.strategy) spec.strategies = {spec.base.strategy};
  const std::vector<onramp::SweepRow> rows =
      onramp::RunSweep(spec, std::filesystem::path(out), jobs);
  const std::string table = onramp::ComparisonCsv(spec.varied, rows);
  std::ofstream(std::filesystem::path(out) / "comparison.csv") << table;
  std::cout << table;
  for (const onramp::SweepRow& row : rows) {
    if (row.collision) {
      PrintCollision(*row.collision);
      return kExitCollision;
    }
  }
  return 0;
}

int ValidateCommand(const CommonFlags& flags, double max_duration) {
  const onramp::ScenarioConfig config = LoadConfig(flags);
  const onramp::ValidationReport report =
      onramp::Validate(config, max_duration);
  std::cout << report.Format();
  return report.passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-ramp merging simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string run_out = "out";
  CLI::App* run = app.add_subcommand("run", "simulate one scenario");
  AddCommonFlags(run, run_flags);
  run->add_option("--out", run_out, "artifact directory");

  CommonFlags sweep_flags;
  std::string sweep_out = "sweep";
  std::string vary;
  std::string values;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  CLI::App* sweep = app.add_subcommand(
      "sweep", "vary one parameter across all strategies");
  AddCommonFlags(sweep, sweep_flags);
  sweep->add_option("--out", sweep_out, "artifact root directory");
  sweep->add_option("--vary", vary,
                    "main_density | ramp_rate | decision_offset | ramp_length")
      ->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--jobs", jobs, "concurrent cells");

  CommonFlags validate_flags;
  double max_duration = 300.0;
  CLI::App* validate =
      app.add_subcommand("validate", "run the invariant suites");
  AddCommonFlags(validate, validate_flags);
  validate->add_option("--max-duration-s", max_duration,
                       "cap on simulated seconds per validation run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return Run(run_flags, run_out);
    if (*sweep) return Sweep(sweep_flags, sweep_out, vary, values, jobs);
    return ValidateCommand(validate_flags, max_duration);
  } catch (const onramp::ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
