#include "onramp/dynamics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace onramp {

void IdmParams::Validate() const {
  if (!(desired_velocity > 0.0) || !(time_headway > 0.0) ||
      !(max_acceleration > 0.0) || !(max_deceleration > 0.0) ||
      !(min_distance > 0.0)) {
    throw std::invalid_argument("IDM parameters v0, T, a, b, s0 must be positive");
  }
  if (!(exponent >= 1.0)) {
    throw std::invalid_argument("IDM exponent must be at least 1");
  }
}

double DesiredGap(double v, double dv, const IdmParams& params) {
  const double dynamic =
      v * params.time_headway +
      v * dv /
          (2.0 * std::sqrt(params.max_acceleration * params.max_deceleration));
  return params.min_distance + std::max(0.0, dynamic);
}

double ClampCommand(double a, const IdmParams& params) {
  return std::clamp(a, -params.max_deceleration, params.max_acceleration);
}

double SafeAcceleration(double v, const LeaderView& leader, double dt,
                        const IdmParams& params) {
  if (!std::isfinite(leader.gap)) return std::numeric_limits<double>::infinity();
  const double b = params.max_deceleration;
  const double vl = leader.leader_velocity;
  const double vl_next = std::max(0.0, vl - b * dt);
  // Room left for this car's step and stopping distance. Braking to rest under
  // the integrator covers at most v'^2/2b + b dt^2/8; the last term is the
  // partial final step.
  const double room = leader.gap - params.min_distance +
                      0.5 * (vl + vl_next) * dt - 0.5 * v * dt +
                      vl_next * vl_next / (2.0 * b) - b * dt * dt / 8.0;
  if (room <= 0.0) return -std::numeric_limits<double>::infinity();
  const double v_next =
      0.5 * (-b * dt + std::sqrt(b * b * dt * dt + 8.0 * b * room));
  return (v_next - v) / dt;
}

namespace {

double RawIdm(double v, const LeaderView& leader, const IdmParams& params) {
  const double free_term = std::pow(v / params.desired_velocity, params.exponent);
  double interaction = 0.0;
  if (std::isfinite(leader.gap)) {
    const double ratio = DesiredGap(v, leader.closing_speed, params) / leader.gap;
    interaction = ratio * ratio;
  }
  return params.max_acceleration * (1.0 - free_term - interaction);
}

}  // namespace

double IdmAcceleration(double v, const LeaderView& leader,
                       const IdmParams& params) {
  if (!(leader.gap > 0.0)) {
    throw std::domain_error("IdmAcceleration: non-positive gap");
  }
  return ClampCommand(RawIdm(v, leader, params), params);
}

double IdmTrackingAcceleration(double v, const LeaderView& leader,
                               const IdmParams& params) {
  if (!(leader.gap > 0.0)) return -params.max_deceleration;
  return ClampCommand(RawIdm(v, leader, params), params);
}

double EquilibriumVelocity(double gap, const IdmParams& params) {
  if (!(gap > 0.0)) {
    throw std::invalid_argument("EquilibriumVelocity: gap must be positive");
  }
  // RawIdm at dv = 0 is strictly decreasing in v; bracket the root in [0, v0].
  auto f = [&](double v) { return RawIdm(v, MakeLeaderView(v, gap, v), params); };
  double lo = 0.0;
  double hi = params.desired_velocity;
  if (f(lo) <= 0.0) return 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

LeaderView EffectiveLeader(const VehicleState& car, const World& world) {
  const auto index = world.index_of(car.id);
  if (!index) throw std::out_of_range("EffectiveLeader: car not in world");
  const auto leader_index = world.leader_index(*index);
  LeaderView view = LeaderView::FreeRoad();
  view.closing_speed = 0.0;
  view.leader_velocity = car.velocity;
  if (leader_index) {
    const VehicleState& leader = world.cars()[*leader_index];
    view = MakeLeaderView(car.velocity, NetGap(car, leader, world.network()),
                          leader.velocity);
  }
  if (car.road == Road::kRamp) {
    const double to_end = world.network().ramp_length - car.position;
    if (to_end < view.gap) view = MakeLeaderView(car.velocity, to_end, 0.0);
  }
  return view;
}

std::vector<double> IdmCommands(const World& world, const IdmParams& params) {
  std::vector<double> commands(world.cars().size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const VehicleState& car = world.cars()[i];
    const LeaderView leader = EffectiveLeader(car, world);
    // The stop at E is a target, not a car: never treat it as a collision.
    commands[i] = car.road == Road::kRamp
                      ? IdmTrackingAcceleration(car.velocity, leader, params)
                      : IdmAcceleration(car.velocity, leader, params);
  }
  return commands;
}

World StepWorld(const World& world, double dt, std::span<const double> commands,
                const IdmParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("StepWorld: dt must be positive");
  if (commands.size() != world.cars().size()) {
    throw std::invalid_argument("StepWorld: one command per car required");
  }
  const RoadNetwork& network = world.network();
  std::vector<VehicleState> next(world.cars().begin(), world.cars().end());
  for (std::size_t i = 0; i < next.size(); ++i) {
    VehicleState& car = next[i];
    const double a = ClampCommand(commands[i], params);
    const double v_next = std::max(0.0, car.velocity + a * dt);
    const double x_next = car.position + 0.5 * (car.velocity + v_next) * dt;
    car.acceleration = (v_next - car.velocity) / dt;
    car.velocity = v_next;
    if (car.road == Road::kMainLoop) {
      car.position = WrapPosition(x_next, network.loop_length);
    } else {
      car.position = std::min(x_next, network.ramp_length);
    }
  }
  return World(network, std::move(next), world.time() + dt);
}

World StepWorld(const World& world, double dt, const IdmParams& params,
                const std::unordered_map<CarId, double>& overrides) {
  std::vector<double> commands = IdmCommands(world, params);
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const VehicleState& car = world.cars()[i];
    auto it = overrides.find(car.id);
    if (it != overrides.end()) {
      commands[i] = it->second;
    } else {
      commands[i] = std::min(
          commands[i],
          SafeAcceleration(car.velocity, EffectiveLeader(car, world), dt,
                           params));
    }
  }
  return StepWorld(world, dt, commands, params);
}

}  // namespace onramp
