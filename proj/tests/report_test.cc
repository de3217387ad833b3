#include "onramp/report.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include "json.hpp"

#include "onramp/config.h"

namespace onramp {
namespace {

ScenarioConfig ShortRun(StrategyKind strategy) {
  ScenarioConfig config = *CanonicalScenario("medium_high_ramp");
  config.strategy = strategy;
  config.duration = 120;
  config.seed = 3;
  return config;
}

TEST(FramesCsvTest, RoundTrip) {
  const RunResult run = RunScenario(ShortRun(StrategyKind::kVelocityBased));
  const std::string csv = FramesCsv(run.frames);
  EXPECT_EQ(csv.substr(0, kFramesHeader.size()), kFramesHeader);
  const std::vector<MetricsFrame> parsed = ParseFramesCsv(csv);
  ASSERT_EQ(parsed.size(), run.frames.size());
  EXPECT_EQ(FramesCsv(parsed), csv);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    ASSERT_EQ(parsed[i].flow, run.frames[i].flow);
    ASSERT_EQ(parsed[i].merged_total, run.frames[i].merged_total);
  }
}

TEST(EventsCsvTest, RoundTripKeepsMissingFields) {
  std::vector<CarRecord> records = {
      {.id = 7, .spawn_t = 5, .decision_t = 14.2, .merge_t = 21.3,
       .entry_v = 16.5, .merge_v = 12.25},
      {.id = 8, .spawn_t = 10, .entry_v = 16.5}};
  const std::vector<CarRecord> parsed = ParseEventsCsv(EventsCsv(records));
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0].merge_t, 21.3);
  EXPECT_EQ(parsed[0].merge_v, 12.25);
  EXPECT_FALSE(parsed[1].decision_t);
  EXPECT_FALSE(parsed[1].merge_t);
  EXPECT_EQ(EventsCsv(parsed), EventsCsv(records));
}

TEST(ParseCsvTest, RejectsMalformed) {
  EXPECT_THROW(ParseFramesCsv("t,flow\n1,2\n"), std::invalid_argument);
  EXPECT_THROW(ParseFramesCsv(std::string(kFramesHeader) + "\n1,2,3\n"),
               std::invalid_argument);
  EXPECT_THROW(ParseEventsCsv(std::string(kEventsHeader) + "\nx,1,,,2,\n"),
               std::invalid_argument);
}

TEST(SummaryJsonTest, ContainsSummaryFields) {
  const RunResult run = RunScenario(ShortRun(StrategyKind::kDistanceBased));
  const nlohmann::json json = nlohmann::json::parse(SummaryJson(run));
  EXPECT_EQ(json.at("total_throughput").get<std::int64_t>(),
            run.summary.total_throughput);
  EXPECT_DOUBLE_EQ(json.at("peak_flow").get<double>(), run.summary.peak_flow);
  EXPECT_TRUE(json.contains("latency_to_fill"));
  EXPECT_TRUE(json.contains("mean_abs_accel_overall"));
}

TEST(RunArtifactTest, WritesAllFiles) {
  const RunResult run = RunScenario(ShortRun(StrategyKind::kPriority));
  const auto dir = std::filesystem::temp_directory_path() / "onramp_artifact";
  std::filesystem::remove_all(dir);
  const RunArtifact artifact = WriteRunArtifact(run, dir);
  for (const auto& path : {artifact.config_path, artifact.frames_path,
                           artifact.events_path, artifact.summary_path}) {
    EXPECT_TRUE(std::filesystem::exists(path)) << path;
  }
  std::ifstream in(artifact.config_path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(SerializeConfig(ParseConfig(text.str())),
            SerializeConfig(run.config));
  std::filesystem::remove_all(dir);
}

TEST(SweepTest, RowsReaggregateFromArtifacts) {
  SweepSpec spec;
  spec.base = ShortRun(StrategyKind::kPriority);
  spec.base.duration = 60;
  spec.varied = SweepParameter::kRampRate;
  spec.values = {6, 12};
  spec.strategies = {StrategyKind::kPriority, StrategyKind::kVelocityBased};
  const auto dir = std::filesystem::temp_directory_path() / "onramp_sweep";
  std::filesystem::remove_all(dir);
  const std::vector<SweepRow> rows = RunSweep(spec, dir, 2);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].value, 6);
  EXPECT_EQ(rows[1].strategy, StrategyKind::kVelocityBased);
  for (const SweepRow& row : rows) {
    EXPECT_FALSE(row.collision);
    const auto run_dir = dir / ("ramp_rate_per_min_" + FormatDouble(row.value)) /
                         std::string(StrategyName(row.strategy));
    auto slurp = [](const std::filesystem::path& path) {
      std::ifstream in(path);
      std::stringstream s;
      s << in.rdbuf();
      return s.str();
    };
    const CellAggregate again =
        AggregateCell(ParseFramesCsv(slurp(run_dir / "frames.csv")),
                      ParseEventsCsv(slurp(run_dir / "events.csv")));
    EXPECT_EQ(again.mean_flow, row.cell.mean_flow);
    EXPECT_EQ(again.mean_abs_accel, row.cell.mean_abs_accel);
    EXPECT_EQ(again.merged_total, row.cell.merged_total);
  }
  const std::string table = ComparisonCsv(spec.varied, rows);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
  std::filesystem::remove_all(dir);
}

TEST(ApplySweepValueTest, RampLengthClampsDecisionOffset) {
  const ScenarioConfig base;
  const ScenarioConfig shorter =
      ApplySweepValue(base, SweepParameter::kRampLength, 250);
  EXPECT_EQ(shorter.network.ramp_length, 250);
  EXPECT_EQ(shorter.network.merge_section_length(),
            base.network.merge_section_length());
  EXPECT_LE(shorter.network.decision_offset, shorter.network.ramp_merge_start());
  EXPECT_NO_THROW(shorter.Validate());
  EXPECT_EQ(ApplySweepValue(base, SweepParameter::kMainDensity, 15)
                .main_density_per_km,
            15);
  EXPECT_EQ(ParseSweepParameter(SweepParameterKey(SweepParameter::kRampRate)),
            SweepParameter::kRampRate);
  EXPECT_FALSE(ParseSweepParameter("colour"));
}

}  // namespace
}  // namespace onramp
