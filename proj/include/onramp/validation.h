#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "onramp/strategies.h"
#include "onramp/traffic_gen.h"
#include "onramp/world.h"

namespace onramp {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<SuiteResult> suites;

  bool passed() const;
  /// One "PASS name: detail" or "FAIL name: detail" line per suite.
  std::string Format() const;
};

/// Free-road convergence to v0, stationarity of a ring platoon at the
/// equilibrium gap, and a collision-free perturbed platoon, all at config.dt.
SuiteResult EquilibriumSuite(const ScenarioConfig& config);
/// Every car on exactly one road and inside it; loop gaps plus car lengths
/// tile the loop exactly.
SuiteResult RingPartitionSuite(const ScenarioConfig& config);
/// Two runs of the same config give byte-identical CSVs.
SuiteResult DeterminismSuite(const ScenarioConfig& config);
/// Car counts balance in every frame and flow = density * mean_velocity.
SuiteResult ConservationSuite(const ScenarioConfig& config);
/// Velocity-based ordering against a constant-velocity crossing simulation on
/// `instances` random scenes of at most five cars.
SuiteResult OracleEquivalenceSuite(const ScenarioConfig& config,
                                   int instances = 1000);

/// Runs every suite. Runs are capped at `max_duration` seconds so validation
/// stays quick for long experiment configs.
ValidationReport Validate(const ScenarioConfig& config,
                          double max_duration = 300.0);

/// Crossing order at O when every car keeps its velocity and cannot pass the
/// car ahead on its own road. Ties go to the main road.
std::vector<CarId> CrossingOrder(const World& world,
                                 const std::vector<CarId>& cars);

/// Random scene of up to `max_cars` cars upstream of O with no overlaps.
World RandomMergeScene(const RoadNetwork& network, std::uint64_t seed,
                       int max_cars = 5);

}  // namespace onramp
