#include "onramp/simulation.h"

#include <algorithm>
#include <cmath>

namespace onramp {

namespace {

constexpr std::uint64_t kNoiseStream = 1;

}  // namespace

Simulation::Simulation(ScenarioConfig config)
    : config_(std::move(config)),
      schedule_(config_.arrival_process, config_.ramp_rate_per_min,
                config_.seed),
      noise_rng_(MakeStream(config_.seed, kNoiseStream)) {
  config_.Validate();
  std::vector<VehicleState> cars =
      InitMainLoop(config_.main_density_per_km, config_.network, config_.idm,
                   config_.vehicle_length);
  initial_main_ = static_cast<std::int64_t>(cars.size());
  world_ = World(config_.network, std::move(cars), 0.0);
  entry_.entry_velocity = config_.entry_velocity_kmh / 3.6;
  entry_.vehicle_length = config_.vehicle_length;
  entry_.next_id = initial_main_;
  steps_per_sample_ = std::max<std::int64_t>(
      1, std::llround(config_.sample_interval / config_.dt));
  RecordFrame();
}

double Simulation::current_decision_offset() const {
  if (config_.sliding_decision) {
    return SlidingDecisionOffset(MeanMainVelocity(world_), world_.network(),
                                 config_.idm);
  }
  return world_.network().decision_offset;
}

CarRecord& Simulation::record(CarId id) {
  return records_[record_index_.at(id)];
}

void Simulation::Step() {
  if (DecidesAhead(config_.strategy)) Decide();

  world_ = StepWorld(world_, config_.dt, Commands(), config_.idm);
  for (std::size_t index : world_.main_order()) {
    const double a = world_.cars()[index].acceleration;
    accel_.Add(a);
    interval_accel_.Add(a);
  }
  ++step_;
  Merge();
  Spawn();
  world_.CheckCollisionFree();
  if (step_ % steps_per_sample_ == 0) RecordFrame();
}

void Simulation::Spawn() {
  auto id = SpawnRampCar(world_, time(), schedule_, entry_, config_.idm);
  if (!id) return;
  CarRecord r;
  r.id = *id;
  r.spawn_t = time();
  r.entry_v = world_.car(*id).velocity;
  record_index_[*id] = records_.size();
  records_.push_back(r);
}

void Simulation::Decide() {
  const double decision_point =
      world_.network().ramp_merge_start() - current_decision_offset();
  std::vector<CarId> deciding;
  for (std::size_t index : world_.ramp_order()) {
    const VehicleState& car = world_.cars()[index];
    if (car.position >= decision_point &&
        !plan_.gap_assignment.contains(car.id)) {
      deciding.push_back(car.id);
    }
  }
  if (deciding.empty()) return;
  const CarLists lists = BuildCarLists(world_, config_.horizon);
  const World perceived =
      PerceiveWorld(world_, config_.sensor_noise_pct, noise_rng_);
  for (CarId id : deciding) {
    plan_.gap_assignment[id] = AssignGapAtDecisionPoint(
        id, lists, perceived, config_.strategy, plan_);
    record(id).decision_t = time();
  }
  plan_.out_list =
      OrderFor(config_.strategy, lists, perceived, config_.idm).out_list;
  plan_.decided_at = time();
}

std::vector<double> Simulation::Commands() const {
  const IdmParams& idm = config_.idm;
  const RoadNetwork& network = world_.network();
  const auto overrides =
      EnforceOrderOnMain(plan_, world_, config_.strategy);
  std::vector<double> commands(world_.cars().size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const VehicleState& car = world_.cars()[i];
    const LeaderView leader = EffectiveLeader(car, world_);
    const double safe =
        SafeAcceleration(car.velocity, leader, config_.dt, idm);
    if (car.road == Road::kMainLoop) {
      auto it = overrides.find(car.id);
      if (it != overrides.end() && it->second.gap < leader.gap) {
        commands[i] = std::min(
            IdmTrackingAcceleration(car.velocity, it->second, idm),
            SafeAcceleration(car.velocity, it->second, config_.dt, idm));
      } else {
        commands[i] = IdmAcceleration(car.velocity, leader, idm);
      }
      commands[i] = std::min(commands[i], safe);
      continue;
    }
    auto assigned = plan_.gap_assignment.find(car.id);
    if (config_.strategy == StrategyKind::kProactiveVelocity &&
        assigned != plan_.gap_assignment.end() &&
        car.position < network.ramp_merge_start()) {
      commands[i] = ProactiveAccelCommand(car, assigned->second, world_, idm);
    } else {
      commands[i] = IdmTrackingAcceleration(car.velocity, leader, idm);
    }
    commands[i] = std::min(commands[i], safe);
  }
  return commands;
}

void Simulation::Merge() {
  const double merge_start = world_.network().ramp_merge_start();
  std::vector<CarId> candidates;
  for (std::size_t index : world_.ramp_order()) {
    const VehicleState& car = world_.cars()[index];
    if (car.position >= merge_start) candidates.push_back(car.id);
  }
  for (CarId id : candidates) {
    auto merged =
        ExecuteMerge(id, world_, config_.idm, config_.strategy);
    if (!merged) continue;
    world_ = std::move(*merged);
    CarRecord& r = record(id);
    r.merge_t = time();
    r.merge_v = world_.car(id).velocity;
    plan_.gap_assignment.erase(id);
    ++merged_total_;
  }
}

void Simulation::RecordFrame() {
  MetricsFrame f;
  f.t = time();
  f.n_main = static_cast<std::int64_t>(world_.main_count());
  f.n_ramp = static_cast<std::int64_t>(world_.ramp_count());
  f.ramp_queue = entry_.queue;
  f.merged_total = merged_total_;
  f.density = static_cast<double>(f.n_main) / world_.network().loop_length;
  f.mean_velocity = MeanMainVelocity(world_);
  f.flow = f.density * f.mean_velocity;
  f.mean_abs_accel = interval_accel_.mean_abs();
  f.hard_decel_events = accel_.hard_decel_events();
  frames_.push_back(f);
  interval_accel_ = AccelStats();
}

RunResult RunScenario(const ScenarioConfig& config) {
  Simulation sim(config);
  RunResult result;
  const auto steps = std::llround(config.duration / config.dt);
  try {
    while (sim.step_count() < steps) sim.Step();
  } catch (const CollisionError& e) {
    result.collision =
        CollisionInfo{e.follower(), e.leader(), sim.time(), e.gap()};
  }
  result.config = sim.config();
  result.frames = sim.frames();
  result.records = sim.records();
  result.accel = sim.accel();
  result.initial_main = sim.initial_main();
  result.arrivals = sim.arrivals();
  result.summary = Summarize(result.frames, result.records, result.accel,
                             config.sample_interval);
  return result;
}

}  // namespace onramp
