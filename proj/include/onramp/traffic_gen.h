#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "onramp/dynamics.h"
#include "onramp/strategies.h"
#include "onramp/world.h"

namespace onramp {

enum class ArrivalProcess { kConstant, kPoisson };

std::string_view ArrivalProcessName(ArrivalProcess process);
std::optional<ArrivalProcess> ParseArrivalProcess(std::string_view name);

inline constexpr double kMaxRampRatePerMinute = 12.0;
inline constexpr double kMaxSensorNoisePct = 3.0;

/// One experiment cell.
struct ScenarioConfig {
  double main_density_per_km = 10.0;
  double ramp_rate_per_min = 0.0;  // 0 disables ramp demand.
  ArrivalProcess arrival_process = ArrivalProcess::kConstant;
  StrategyKind strategy = StrategyKind::kPriority;
  RoadNetwork network;
  IdmParams idm;
  double dt = 0.1;
  double duration = 1800.0;
  std::uint64_t seed = 1;
  double sensor_noise_pct = 0.0;
  KnowledgeHorizon horizon;
  bool sliding_decision = false;
  double vehicle_length = 5.0;
  double entry_velocity_kmh = 60.0;
  double sample_interval = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

/// Canonical cells: {light, medium, heavy} x {low_ramp, high_ramp}, e.g.
/// "medium_high_ramp". Returns nullopt for unknown names.
std::optional<ScenarioConfig> CanonicalScenario(std::string_view name,
                                                ScenarioConfig base = {});
std::vector<std::string_view> CanonicalScenarioNames();

/// `round(density * loop_length / 1000)` equally spaced cars at the
/// equilibrium velocity of their spacing, ids starting at `first_id`.
/// Throws std::invalid_argument when the spacing cannot hold length + s0.
std::vector<VehicleState> InitMainLoop(double density_per_km,
                                       const RoadNetwork& network,
                                       const IdmParams& idm,
                                       double vehicle_length = 5.0,
                                       CarId first_id = 0);

/// Uniform draw in [0, 1) from the top 53 bits of one generator output.
double UniformUnit(std::mt19937_64& rng);

/// Constant: exactly 60 / rate. Poisson: exponential with mean 60 / rate.
double NextInterarrival(ArrivalProcess process, double rate_per_min,
                        std::mt19937_64& rng);

/// Seeded arrival stream for the ramp.
class ArrivalSchedule {
 public:
  ArrivalSchedule(ArrivalProcess process, double rate_per_min,
                  std::uint64_t seed);

  /// Time of the next arrival; infinity when the rate is zero.
  double next_arrival_time() const { return next_arrival_time_; }
  /// Number of arrivals due by time `t`, advancing the stream past them.
  int PopDue(double t);

 private:
  ArrivalProcess process_;
  double rate_per_min_;
  std::mt19937_64 rng_;
  double next_arrival_time_;
};

/// FIFO of arrivals waiting for the ramp entry to clear.
struct RampEntry {
  double entry_velocity = 60.0 / 3.6;
  double vehicle_length = 5.0;
  int queue = 0;
  CarId next_id = 0;
};

/// Adds arrivals due by `now` to the queue, then inserts at most one queued
/// car at ramp position 0 if the first length + s0 meters are clear. The entry
/// speed is the configured one, reduced if needed so the new car could stop
/// behind its ramp leader braking at b. Returns the id of the spawned car.
std::optional<CarId> SpawnRampCar(World& world, double now,
                                  ArrivalSchedule& schedule, RampEntry& entry,
                                  const IdmParams& idm);

/// true * (1 + u), u uniform in [-pct/100, pct/100].
double ApplySensorNoise(double true_value, double pct, std::mt19937_64& rng);

/// Copy of `world` as seen through noisy sensors: each car's offset from O and
/// velocity are perturbed independently. Road membership and order are kept.
World PerceiveWorld(const World& world, double pct, std::mt19937_64& rng);

/// Derives an independent generator for stream `stream` of a run seed.
std::mt19937_64 MakeStream(std::uint64_t seed, std::uint64_t stream);

}  // namespace onramp
