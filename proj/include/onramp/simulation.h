#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "onramp/metrics.h"
#include "onramp/strategies.h"
#include "onramp/traffic_gen.h"
#include "onramp/world.h"

namespace onramp {

struct CollisionInfo {
  CarId follower = 0;
  CarId leader = 0;
  double time = 0.0;
  double gap = 0.0;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<MetricsFrame> frames;
  std::vector<CarRecord> records;
  AccelStats accel;
  RunSummary summary;
  std::int64_t initial_main = 0;
  std::int64_t arrivals = 0;
  std::optional<CollisionInfo> collision;
};

/// Fixed-timestep closed-loop run of one scenario. Each step: fix merge
/// decisions for ramp cars past D, compute every command from the frozen
/// snapshot, integrate, execute feasible merges front-most ramp car first, then
/// queue and spawn ramp arrivals due by the new time.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);

  /// Advances one dt. Throws CollisionError on overlap.
  void Step();

  const World& world() const { return world_; }
  const ScenarioConfig& config() const { return config_; }
  const MergePlan& plan() const { return plan_; }
  std::int64_t step_count() const { return step_; }
  double time() const { return static_cast<double>(step_) * config_.dt; }
  const std::vector<MetricsFrame>& frames() const { return frames_; }
  const std::vector<CarRecord>& records() const { return records_; }
  const AccelStats& accel() const { return accel_; }
  std::int64_t initial_main() const { return initial_main_; }
  std::int64_t arrivals() const {
    return static_cast<std::int64_t>(records_.size()) + entry_.queue;
  }
  std::int64_t merged_total() const { return merged_total_; }
  int ramp_queue() const { return entry_.queue; }
  /// Decision offset in force this step (sliding or fixed).
  double current_decision_offset() const;

 private:
  void Spawn();
  void Decide();
  std::vector<double> Commands() const;
  void Merge();
  void RecordFrame();
  CarRecord& record(CarId id);

  ScenarioConfig config_;
  World world_;
  ArrivalSchedule schedule_;
  RampEntry entry_;
  std::mt19937_64 noise_rng_;
  MergePlan plan_;
  std::vector<CarRecord> records_;
  std::unordered_map<CarId, std::size_t> record_index_;
  std::vector<MetricsFrame> frames_;
  AccelStats accel_;
  AccelStats interval_accel_;
  std::int64_t step_ = 0;
  std::int64_t steps_per_sample_ = 10;
  std::int64_t initial_main_ = 0;
  std::int64_t merged_total_ = 0;
};

/// Runs `config.duration` seconds and summarizes. A collision stops the run and
/// is reported in RunResult::collision; frames up to that step are kept.
RunResult RunScenario(const ScenarioConfig& config);

}  // namespace onramp
