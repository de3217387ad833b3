#pragma once

#include <limits>
#include <span>
#include <unordered_map>

#include "onramp/world.h"

namespace onramp {

/// Intelligent driver model parameters. Defaults are the highway values used
/// throughout the experiments (100 km/h desired velocity).
struct IdmParams {
  double desired_velocity = 100.0 / 3.6;
  double time_headway = 1.5;
  double max_acceleration = 1.0;
  double max_deceleration = 3.0;  // Comfortable braking and the command floor.
  double min_distance = 2.0;
  double exponent = 4.0;

  void Validate() const;
};

struct LeaderView {
  double gap = std::numeric_limits<double>::infinity();
  double leader_velocity = 0.0;
  double closing_speed = 0.0;  // Follower velocity minus leader velocity.

  static LeaderView FreeRoad() { return {}; }
};

/// s*(v, dv) = s0 + max(0, v T + v dv / (2 sqrt(a b))).
double DesiredGap(double v, double dv, const IdmParams& params);

/// a [1 - (v/v0)^delta - (s*/s)^2], clamped to [-b, a]. A non-positive gap is
/// an existing collision and throws std::domain_error.
double IdmAcceleration(double v, const LeaderView& leader,
                       const IdmParams& params);

/// Same law for leaders that are targets rather than physical cars (projected
/// slots, the virtual stop at E). Gaps at or below zero saturate at -b.
double IdmTrackingAcceleration(double v, const LeaderView& leader,
                               const IdmParams& params);

double ClampCommand(double a, const IdmParams& params);

/// Largest command after which the car could still stop s0 behind `leader`
/// if both braked at b from the next step on, given the integrator below.
/// +inf on a free road. Zero-order IDM with a hard floor at -b is not
/// collision-free in strong stop-and-go waves; commands are capped by this.
double SafeAcceleration(double v, const LeaderView& leader, double dt,
                        const IdmParams& params);

/// Steady-state velocity for a homogeneous platoon with net gap `gap`: the
/// root in [0, v0] of IdmAcceleration at dv = 0, found by bisection.
double EquilibriumVelocity(double gap, const IdmParams& params);

/// Leader seen by `car`. Loop cars follow the next loop car. Ramp cars follow
/// the nearer of their ramp leader and a stopped zero-length car at E.
LeaderView EffectiveLeader(const VehicleState& car, const World& world);

/// Leader view toward a target located `gap` meters ahead moving at
/// `leader_velocity`.
inline LeaderView MakeLeaderView(double v, double gap, double leader_velocity) {
  return {gap, leader_velocity, v - leader_velocity};
}

/// Plain IDM commands against EffectiveLeader for every car, aligned with
/// world.cars().
std::vector<double> IdmCommands(const World& world, const IdmParams& params);

/// Advances every car by `dt` with the given commands (aligned with
/// world.cars(); each is clamped to [-b, a]):
///   v' = max(0, v + a dt),  x' = x + (v + v') / 2 dt.
/// Loop positions wrap; ramp positions stop at E.
World StepWorld(const World& world, double dt, std::span<const double> commands,
                const IdmParams& params);

/// Same, with IDM commands capped by SafeAcceleration for every car not
/// listed in `overrides`.
World StepWorld(const World& world, double dt, const IdmParams& params,
                const std::unordered_map<CarId, double>& overrides = {});

}  // namespace onramp
