#include "onramp/traffic_gen.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace onramp {

std::string_view ArrivalProcessName(ArrivalProcess process) {
  return process == ArrivalProcess::kPoisson ? "poisson" : "constant";
}

std::optional<ArrivalProcess> ParseArrivalProcess(std::string_view name) {
  if (name == "constant") return ArrivalProcess::kConstant;
  if (name == "poisson") return ArrivalProcess::kPoisson;
  return std::nullopt;
}

void ScenarioConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(main_density_per_km >= 0.0 && std::isfinite(main_density_per_km),
          "main_density_per_km must be non-negative");
  require(ramp_rate_per_min >= 0.0, "ramp_rate_per_min must be non-negative");
  require(ramp_rate_per_min <= kMaxRampRatePerMinute,
          "ramp_rate_per_min exceeds the 12 cars/minute ramp capacity");
  require(sensor_noise_pct >= 0.0 && sensor_noise_pct <= kMaxSensorNoisePct,
          "sensor_noise_pct must lie in [0, 3]");
  require(dt > 0.0 && std::isfinite(dt), "dt_s must be positive");
  require(duration >= 0.0 && std::isfinite(duration),
          "duration_s must be non-negative");
  require(horizon.limit > 0, "neighbor_limit must be positive");
  require(horizon.range > 0.0, "neighbor_range_m must be positive");
  require(vehicle_length > 0.0, "vehicle_length_m must be positive");
  require(entry_velocity_kmh >= 0.0, "entry_velocity_kmh must be non-negative");
  require(sample_interval > 0.0, "sample interval must be positive");
  network.Validate();
  idm.Validate();
}

namespace {

struct CanonicalCell {
  std::string_view name;
  double density;
  double ramp_rate;
};

constexpr std::array<CanonicalCell, 6> kCanonicalCells = {{
    {"light_low_ramp", 5.0, 6.0},
    {"light_high_ramp", 5.0, 12.0},
    {"medium_low_ramp", 10.0, 6.0},
    {"medium_high_ramp", 10.0, 12.0},
    {"heavy_low_ramp", 15.0, 6.0},
    {"heavy_high_ramp", 15.0, 12.0},
}};

}  // namespace

std::optional<ScenarioConfig> CanonicalScenario(std::string_view name,
                                                ScenarioConfig base) {
  for (const CanonicalCell& cell : kCanonicalCells) {
    if (cell.name == name) {
      base.main_density_per_km = cell.density;
      base.ramp_rate_per_min = cell.ramp_rate;
      return base;
    }
  }
  return std::nullopt;
}

std::vector<std::string_view> CanonicalScenarioNames() {
  std::vector<std::string_view> names;
  for (const CanonicalCell& cell : kCanonicalCells) names.push_back(cell.name);
  return names;
}

std::vector<VehicleState> InitMainLoop(double density_per_km,
                                       const RoadNetwork& network,
                                       const IdmParams& idm,
                                       double vehicle_length, CarId first_id) {
  const auto count = static_cast<std::size_t>(
      std::llround(density_per_km * network.loop_length / 1000.0));
  std::vector<VehicleState> cars;
  if (count == 0) return cars;
  const double spacing = network.loop_length / static_cast<double>(count);
  if (spacing < vehicle_length + idm.min_distance) {
    throw std::invalid_argument(
        "main_density_per_km too high: spacing " + std::to_string(spacing) +
        " m cannot hold a car plus the minimum distance");
  }
  const double velocity = EquilibriumVelocity(spacing - vehicle_length, idm);
  cars.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    VehicleState car;
    car.id = first_id + static_cast<CarId>(i);
    car.road = Road::kMainLoop;
    car.position = WrapPosition(
        network.merge_start + static_cast<double>(i) * spacing,
        network.loop_length);
    car.velocity = velocity;
    car.length = vehicle_length;
    cars.push_back(car);
  }
  return cars;
}

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double NextInterarrival(ArrivalProcess process, double rate_per_min,
                        std::mt19937_64& rng) {
  if (!(rate_per_min > 0.0)) {
    throw std::invalid_argument("NextInterarrival: rate must be positive");
  }
  const double mean = 60.0 / rate_per_min;
  if (process == ArrivalProcess::kConstant) return mean;
  return -std::log1p(-UniformUnit(rng)) * mean;
}

ArrivalSchedule::ArrivalSchedule(ArrivalProcess process, double rate_per_min,
                                 std::uint64_t seed)
    : process_(process),
      rate_per_min_(rate_per_min),
      rng_(MakeStream(seed, 0)),
      next_arrival_time_(std::numeric_limits<double>::infinity()) {
  if (rate_per_min_ > 0.0) {
    next_arrival_time_ = NextInterarrival(process_, rate_per_min_, rng_);
  }
}

int ArrivalSchedule::PopDue(double t) {
  int due = 0;
  while (next_arrival_time_ <= t) {
    ++due;
    next_arrival_time_ += NextInterarrival(process_, rate_per_min_, rng_);
  }
  return due;
}

std::optional<CarId> SpawnRampCar(World& world, double now,
                                  ArrivalSchedule& schedule, RampEntry& entry,
                                  const IdmParams& idm) {
  entry.queue += schedule.PopDue(now);
  if (entry.queue == 0) return std::nullopt;

  const double clear = entry.vehicle_length + idm.min_distance;
  double velocity = entry.entry_velocity;
  if (!world.ramp_order().empty()) {
    const VehicleState& last = world.cars()[world.ramp_order().back()];
    const double gap = last.position - last.length;
    if (gap < clear) return std::nullopt;
    const double safe = std::sqrt(last.velocity * last.velocity +
                                  2.0 * idm.max_deceleration *
                                      (gap - idm.min_distance));
    velocity = std::min(velocity, safe);
  }
  const double to_end = world.network().ramp_length;
  velocity = std::min(
      velocity, std::sqrt(2.0 * idm.max_deceleration *
                          std::max(0.0, to_end - idm.min_distance)));

  VehicleState car;
  car.id = entry.next_id++;
  car.road = Road::kRamp;
  car.position = 0.0;
  car.velocity = velocity;
  car.length = entry.vehicle_length;
  std::vector<VehicleState> cars(world.cars().begin(), world.cars().end());
  cars.push_back(car);
  world = World(world.network(), std::move(cars), world.time());
  --entry.queue;
  return car.id;
}

double ApplySensorNoise(double true_value, double pct, std::mt19937_64& rng) {
  if (pct == 0.0) return true_value;
  const double u = (2.0 * UniformUnit(rng) - 1.0) * pct / 100.0;
  return true_value * (1.0 + u);
}

World PerceiveWorld(const World& world, double pct, std::mt19937_64& rng) {
  if (pct == 0.0) return world;
  const RoadNetwork& network = world.network();
  std::vector<VehicleState> cars(world.cars().begin(), world.cars().end());
  for (VehicleState& car : cars) {
    const double offset =
        ApplySensorNoise(OffsetFromMergeStart(car, network), pct, rng);
    if (car.road == Road::kRamp) {
      car.position = std::clamp(network.ramp_merge_start() + offset, 0.0,
                                network.ramp_length);
    } else {
      car.position =
          WrapPosition(network.merge_start + offset, network.loop_length);
    }
    car.velocity = ApplySensorNoise(car.velocity, pct, rng);
  }
  return World(network, std::move(cars), world.time());
}

std::mt19937_64 MakeStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace onramp
