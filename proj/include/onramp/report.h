#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "onramp/metrics.h"
#include "onramp/simulation.h"

namespace onramp {

inline constexpr std::string_view kFramesHeader =
    "t,n_main,n_ramp,ramp_queue,merged_total,density,mean_velocity,flow,"
    "mean_abs_accel,hard_decel_events";
inline constexpr std::string_view kEventsHeader =
    "car_id,spawn_t,decision_t,merge_t,entry_v,merge_v";

std::string FramesCsv(std::span<const MetricsFrame> frames);
std::string EventsCsv(std::span<const CarRecord> records);
std::string SummaryJson(const RunResult& result);

/// Inverse of FramesCsv / EventsCsv. Throws std::invalid_argument on malformed
/// input.
std::vector<MetricsFrame> ParseFramesCsv(std::string_view text);
std::vector<CarRecord> ParseEventsCsv(std::string_view text);

struct RunArtifact {
  std::filesystem::path config_path;
  std::filesystem::path frames_path;
  std::filesystem::path events_path;
  std::filesystem::path summary_path;
};

/// Writes config.txt, frames.csv, events.csv and summary.json under `dir`.
RunArtifact WriteRunArtifact(const RunResult& result,
                             const std::filesystem::path& dir);

enum class SweepParameter { kMainDensity, kRampRate, kDecisionOffset, kRampLength };

std::optional<SweepParameter> ParseSweepParameter(std::string_view key);
std::string_view SweepParameterKey(SweepParameter parameter);

/// One base config with exactly one parameter varied.
struct SweepSpec {
  ScenarioConfig base;
  SweepParameter varied = SweepParameter::kRampRate;
  std::vector<double> values;
  std::vector<StrategyKind> strategies = {std::begin(kAllStrategies),
                                          std::end(kAllStrategies)};
};

/// Config for one sweep value. Varying the ramp length keeps the merge section
/// and clamps the decision offset so D stays on the ramp.
ScenarioConfig ApplySweepValue(const ScenarioConfig& base,
                               SweepParameter parameter, double value);

struct SweepRow {
  double value = 0.0;
  StrategyKind strategy = StrategyKind::kPriority;
  CellAggregate cell;
  std::optional<CollisionInfo> collision;
};

/// One run per value and strategy, all with the base seed. When `out_dir` is
/// set each run's artifact goes to out_dir/<key>_<value>/<strategy>/. Cells
/// run on up to `jobs` threads; row order is value-major, strategy-minor.
std::vector<SweepRow> RunSweep(
    const SweepSpec& spec,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt,
    unsigned jobs = 1);

std::string ComparisonCsv(SweepParameter parameter,
                          std::span<const SweepRow> rows);

}  // namespace onramp
