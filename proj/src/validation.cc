#include "onramp/validation.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "onramp/dynamics.h"
#include "onramp/report.h"
#include "onramp/simulation.h"

namespace onramp {

namespace {

// Density used for platoon checks when the config has an empty loop.
constexpr double kFallbackDensity = 10.0;

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

SuiteResult Guarded(const char* name, auto body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, e.what()};
  }
}

ScenarioConfig Capped(ScenarioConfig config, double max_duration) {
  config.duration = std::min(config.duration, max_duration);
  return config;
}

// Steps a world under plain IDM, calling `check` after each step. Stops early
// when `check` returns false.
template <typename Check>
World Drive(World world, const ScenarioConfig& config, double seconds,
            Check check) {
  const auto steps = std::llround(seconds / config.dt);
  for (std::int64_t i = 0; i < steps; ++i) {
    world = StepWorld(world, config.dt, config.idm);
    if (!check(world)) break;
  }
  return world;
}

double CrossingDistance(const VehicleState& car, const RoadNetwork& network) {
  if (car.road == Road::kRamp) {
    return std::max(0.0, network.ramp_merge_start() - car.position);
  }
  double d = std::fmod(network.merge_start - car.position, network.loop_length);
  if (d < 0.0) d += network.loop_length;
  return d;
}

}  // namespace

bool ValidationReport::passed() const {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return s.passed; });
}

std::string ValidationReport::Format() const {
  std::ostringstream os;
  for (const SuiteResult& s : suites) {
    os << (s.passed ? "PASS " : "FAIL ") << s.name << ": " << s.detail << '\n';
  }
  return os.str();
}

SuiteResult EquilibriumSuite(const ScenarioConfig& config) {
  return Guarded("equilibrium", [&]() -> SuiteResult {
    config.Validate();
    std::vector<std::string> failures;
    const IdmParams& idm = config.idm;

    // A lone car on the loop accelerates to v0.
    VehicleState lone;
    lone.length = config.vehicle_length;
    World single(config.network, {lone});
    single = Drive(single, config, 600.0, [](const World&) { return true; });
    const double v = single.cars()[0].velocity;
    const double free_error = std::abs(v - idm.desired_velocity) /
                              idm.desired_velocity;
    if (!(free_error < 1e-3)) {
      failures.push_back("free-road velocity " + std::to_string(v) +
                         " misses v0 by " + std::to_string(100 * free_error) +
                         "%");
    }

    // A homogeneous platoon at the equilibrium gap stays put.
    const double density = config.main_density_per_km > 0.0
                               ? config.main_density_per_km
                               : kFallbackDensity;
    const std::vector<VehicleState> platoon = InitMainLoop(
        density, config.network, idm, config.vehicle_length);
    double max_abs = 0.0;
    Drive(World(config.network, platoon), config, 60.0, [&](const World& w) {
      for (const VehicleState& car : w.cars()) {
        max_abs = std::max(max_abs, std::abs(car.acceleration));
      }
      return true;
    });
    if (!(max_abs < 1e-6)) {
      failures.push_back("stationary platoon reached |a| = " +
                         std::to_string(max_abs));
    }

    // A perturbed platoon settles without contact.
    std::vector<VehicleState> perturbed = platoon;
    if (perturbed.size() > 1) {
      const double spacing =
          config.network.loop_length / static_cast<double>(perturbed.size());
      const double slack = spacing - config.vehicle_length - idm.min_distance;
      perturbed[0].position = WrapPosition(
          perturbed[0].position + 0.5 * slack, config.network.loop_length);
    }
    std::string contact;
    Drive(World(config.network, perturbed), config, 120.0,
          [&](const World& w) {
            try {
              w.CheckCollisionFree();
              return true;
            } catch (const CollisionError& e) {
              contact = e.what();
              return false;
            }
          });
    if (!contact.empty()) failures.push_back("perturbed platoon: " + contact);

    if (failures.empty()) {
      std::ostringstream os;
      os << "free-road error " << 100 * free_error << "%, platoon max |a| "
         << max_abs << ", perturbed platoon collision-free";
      return {"equilibrium", true, os.str()};
    }
    return {"equilibrium", false, Join(failures)};
  });
}

SuiteResult RingPartitionSuite(const ScenarioConfig& config) {
  return Guarded("ring-partition", [&]() -> SuiteResult {
    Simulation sim(config);
    const RoadNetwork& network = config.network;
    const auto steps = std::llround(config.duration / config.dt);
    auto check = [&]() -> std::string {
      const World& w = sim.world();
      if (w.main_count() + w.ramp_count() != w.cars().size()) {
        return "car on no road";
      }
      double tiled = 0.0;
      for (std::size_t index : w.main_order()) {
        const VehicleState& car = w.cars()[index];
        if (!(car.position >= 0.0 && car.position < network.loop_length)) {
          return "car " + std::to_string(car.id) + " off the loop";
        }
        const std::size_t leader = *w.leader_index(index);
        tiled += NetGap(car, w.cars()[leader], network) + car.length;
      }
      if (w.main_count() > 1 &&
          std::abs(tiled - network.loop_length) > 1e-6 * network.loop_length) {
        return "loop gaps and lengths sum to " + std::to_string(tiled);
      }
      for (std::size_t index : w.ramp_order()) {
        const VehicleState& car = w.cars()[index];
        if (!(car.position >= 0.0 && car.position <= network.ramp_length)) {
          return "car " + std::to_string(car.id) + " off the ramp";
        }
      }
      return {};
    };
    std::string problem = check();
    while (problem.empty() && sim.step_count() < steps) {
      sim.Step();
      problem = check();
    }
    if (!problem.empty()) {
      return {"ring-partition", false,
              "t = " + std::to_string(sim.time()) + ": " + problem};
    }
    return {"ring-partition", true,
            std::to_string(steps) + " steps partitioned"};
  });
}

SuiteResult DeterminismSuite(const ScenarioConfig& config) {
  return Guarded("determinism", [&]() -> SuiteResult {
    const RunResult a = RunScenario(config);
    const RunResult b = RunScenario(config);
    const bool same = FramesCsv(a.frames) == FramesCsv(b.frames) &&
                      EventsCsv(a.records) == EventsCsv(b.records) &&
                      SummaryJson(a) == SummaryJson(b);
    if (a.collision) {
      return {"determinism", false,
              "collision at t = " + std::to_string(a.collision->time)};
    }
    return {"determinism", same,
            same ? "repeat run byte-identical" : "repeat run differs"};
  });
}

SuiteResult ConservationSuite(const ScenarioConfig& config) {
  return Guarded("conservation", [&]() -> SuiteResult {
    const RunResult run = RunScenario(config);
    if (run.collision) {
      return {"conservation", false,
              "collision at t = " + std::to_string(run.collision->time)};
    }
    for (const MetricsFrame& f : run.frames) {
      const auto spawned = std::count_if(
          run.records.begin(), run.records.end(),
          [&](const CarRecord& r) { return r.spawn_t <= f.t; });
      if (f.n_main != run.initial_main + f.merged_total ||
          f.n_ramp != spawned - f.merged_total) {
        return {"conservation", false,
                "car counts unbalanced at t = " + std::to_string(f.t)};
      }
      if (f.flow != f.density * f.mean_velocity) {
        return {"conservation", false,
                "flow identity broken at t = " + std::to_string(f.t)};
      }
    }
    return {"conservation", true,
            std::to_string(run.frames.size()) + " frames balanced"};
  });
}

std::vector<CarId> CrossingOrder(const World& world,
                                 const std::vector<CarId>& cars) {
  const RoadNetwork& network = world.network();
  struct Crossing {
    double time;
    int road;  // 0 main, 1 ramp.
    double distance;
    CarId id;
  };
  std::vector<Crossing> main;
  std::vector<Crossing> ramp;
  for (CarId id : cars) {
    const VehicleState& car = world.car(id);
    const double d = CrossingDistance(car, network);
    const double t = d / std::max(car.velocity, kArrivalVelocityFloor);
    if (car.road == Road::kRamp) {
      ramp.push_back({t, 1, d, id});
    } else {
      main.push_back({t, 0, d, id});
    }
  }
  // Cars on one road cross in road order and never before the car ahead.
  for (auto* road : {&main, &ramp}) {
    std::sort(road->begin(), road->end(),
              [](const Crossing& a, const Crossing& b) {
                return a.distance < b.distance;
              });
    for (std::size_t i = 1; i < road->size(); ++i) {
      (*road)[i].time = std::max((*road)[i].time, (*road)[i - 1].time);
    }
  }
  std::vector<Crossing> all = main;
  all.insert(all.end(), ramp.begin(), ramp.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const Crossing& a, const Crossing& b) {
                     if (a.time != b.time) return a.time < b.time;
                     return a.road < b.road;
                   });
  std::vector<CarId> order;
  for (const Crossing& c : all) order.push_back(c.id);
  return order;
}

World RandomMergeScene(const RoadNetwork& network, std::uint64_t seed,
                       int max_cars) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(1, max_cars);
  std::uniform_real_distribution<double> velocity_dist(0.0, 30.0);
  const int count = count_dist(rng);
  const double ramp_o = network.ramp_merge_start();
  const double main_reach = 400.0;
  std::vector<VehicleState> cars;
  std::vector<double> main_offsets;
  std::vector<double> ramp_positions;
  const double min_spacing = 7.0;
  auto clear = [&](const std::vector<double>& taken, double x) {
    return std::all_of(taken.begin(), taken.end(), [&](double y) {
      return std::abs(x - y) >= min_spacing;
    });
  };
  for (int i = 0; i < count; ++i) {
    VehicleState car;
    car.id = i;
    car.velocity = velocity_dist(rng);
    const bool on_ramp = std::bernoulli_distribution(0.5)(rng);
    for (;;) {
      if (on_ramp) {
        const double x =
            std::uniform_real_distribution<double>(5.0, ramp_o)(rng);
        if (!clear(ramp_positions, x)) continue;
        ramp_positions.push_back(x);
        car.road = Road::kRamp;
        car.position = x;
      } else {
        const double offset =
            std::uniform_real_distribution<double>(-main_reach, 0.0)(rng);
        if (!clear(main_offsets, offset)) continue;
        main_offsets.push_back(offset);
        car.road = Road::kMainLoop;
        car.position = WrapPosition(network.merge_start + offset,
                                    network.loop_length);
      }
      break;
    }
    cars.push_back(car);
  }
  return World(network, std::move(cars));
}

SuiteResult OracleEquivalenceSuite(const ScenarioConfig& config,
                                   int instances) {
  return Guarded("oracle-equivalence", [&]() -> SuiteResult {
    for (int i = 0; i < instances; ++i) {
      const World scene =
          RandomMergeScene(config.network, config.seed * 1000003ULL + i);
      const CarLists lists = BuildCarLists(scene, config.horizon);
      std::vector<CarId> ids;
      for (const VehicleState& car : scene.cars()) ids.push_back(car.id);
      const std::vector<CarId> expected = CrossingOrder(scene, ids);
      const MergePlan plan = OrderVelocityBased(lists, scene);
      if (plan.out_list != expected) {
        return {"oracle-equivalence", false,
                "instance " + std::to_string(i) + " ordered differently"};
      }
    }
    return {"oracle-equivalence", true,
            std::to_string(instances) + " random instances match"};
  });
}

ValidationReport Validate(const ScenarioConfig& config, double max_duration) {
  const ScenarioConfig capped = Capped(config, max_duration);
  ValidationReport report;
  report.suites.push_back(EquilibriumSuite(capped));
  report.suites.push_back(RingPartitionSuite(capped));
  report.suites.push_back(DeterminismSuite(capped));
  report.suites.push_back(ConservationSuite(capped));
  report.suites.push_back(OracleEquivalenceSuite(capped));
  return report;
}

}  // namespace onramp
