#include "onramp/strategies.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace onramp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Followers settle onto s0 from above, so exact comparisons against s0 can
// fail by rounding alone.
constexpr double kGapTolerance = 1e-6;
// Extra room a yielding loop car keeps behind its ramp car's projection. A
// follower creeping up on a stopped car can settle a few millimetres inside
// s0, which would fail the insertion check forever.
constexpr double kYieldMargin = 0.5;

// Gap at which a follower braking at b stops at least s0 behind a leader that
// brakes at b too.
double StoppingGap(double v_follower, double v_leader, const IdmParams& params) {
  const double b = params.max_deceleration;
  return params.min_distance +
         std::max(0.0, (v_follower * v_follower - v_leader * v_leader) /
                           (2.0 * b));
}


// Index of the loop car directly behind `leader`, if it is a loop car with a
// distinct follower.
std::optional<std::size_t> MainFollowerOf(const World& world, CarId leader) {
  const auto leader_index = world.index_of(leader);
  if (!leader_index || world.cars()[*leader_index].road != Road::kMainLoop) {
    return std::nullopt;
  }
  const auto& order = world.main_order();
  if (order.size() < 2) return std::nullopt;
  const auto it = std::find(order.begin(), order.end(), *leader_index);
  return it == order.begin() ? order.back() : *std::prev(it);
}

using KeyFn = double (*)(const VehicleState&, const RoadNetwork&);

double DistanceKey(const VehicleState& car, const RoadNetwork& network) {
  return DistanceToPoint(car, network.merge_start, network);
}

double ArrivalKey(const VehicleState& car, const RoadNetwork& network) {
  return PredictArrivalTime(car, network.merge_start, network);
}

// Head-vs-head merge of the two per-road sequences; ties go to the main road.
MergePlan StableMerge(const CarLists& lists, const World& world, KeyFn key) {
  MergePlan plan;
  plan.decided_at = world.time();
  const RoadNetwork& network = world.network();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < lists.main_list.size() || j < lists.ramp_list.size()) {
    if (j == lists.ramp_list.size()) {
      plan.out_list.push_back(lists.main_list[i++]);
    } else if (i == lists.main_list.size()) {
      plan.out_list.push_back(lists.ramp_list[j++]);
    } else {
      const double main_key = key(world.car(lists.main_list[i]), network);
      const double ramp_key = key(world.car(lists.ramp_list[j]), network);
      if (main_key <= ramp_key) {
        plan.out_list.push_back(lists.main_list[i++]);
      } else {
        plan.out_list.push_back(lists.ramp_list[j++]);
      }
    }
  }
  return plan;
}

}  // namespace

std::string_view StrategyName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kPriority:
      return "priority";
    case StrategyKind::kDistanceBased:
      return "distance";
    case StrategyKind::kVelocityBased:
      return "velocity";
    case StrategyKind::kProactiveVelocity:
      return "proactive_velocity";
  }
  return "unknown";
}

std::optional<StrategyKind> ParseStrategyKind(std::string_view name) {
  for (StrategyKind kind : kAllStrategies) {
    if (StrategyName(kind) == name) return kind;
  }
  return std::nullopt;
}

double PredictArrivalTime(const VehicleState& car, double point,
                          const RoadNetwork& network) {
  return DistanceToPoint(car, point, network) /
         std::max(car.velocity, kArrivalVelocityFloor);
}

InsertionCheck CheckInsertion(const VehicleState& ramp_car, const World& world,
                              const IdmParams& params) {
  InsertionCheck check;
  const RoadNetwork& network = world.network();
  const double p = ProjectOntoLoop(ramp_car, network);
  const VehicleState* leader = nullptr;
  const VehicleState* follower = nullptr;
  double ahead_min = kInf;
  double ahead_max = -kInf;
  for (std::size_t index : world.main_order()) {
    const VehicleState& car = world.cars()[index];
    const double ahead = WrapPosition(car.position - p, network.loop_length);
    if (ahead < ahead_min) {
      ahead_min = ahead;
      leader = &car;
    }
    if (ahead > ahead_max) {
      ahead_max = ahead;
      follower = &car;
    }
  }
  if (leader == nullptr) {
    check.front_gap = kInf;
    check.rear_gap = kInf;
    check.safe = check.priority = true;
    return check;
  }
  check.leader = leader->id;
  check.follower = follower->id;
  check.front_gap = ahead_min - leader->length;
  check.rear_gap = network.loop_length - ahead_max - ramp_car.length;

  const double v = ramp_car.velocity;
  check.safe =
      check.front_gap + kGapTolerance >=
          StoppingGap(v, leader->velocity, params) &&
      check.rear_gap + kGapTolerance >=
          StoppingGap(follower->velocity, v, params);
  check.priority =
      check.safe &&
      check.front_gap + kGapTolerance >=
          DesiredGap(v, v - leader->velocity, params);
  return check;
}

bool PriorityCanMerge(const VehicleState& ramp_car, const World& world,
                      const IdmParams& params) {
  return CheckInsertion(ramp_car, world, params).priority;
}

MergePlan OrderDistanceBased(const CarLists& lists, const World& world) {
  return StableMerge(lists, world, &DistanceKey);
}

MergePlan OrderVelocityBased(const CarLists& lists, const World& world) {
  return StableMerge(lists, world, &ArrivalKey);
}

MergePlan OrderPriority(const CarLists& lists, const World& world,
                        const IdmParams& params) {
  const RoadNetwork& network = world.network();
  struct Passing {
    double time;
    double velocity;
    double length;
  };
  auto passing_of = [&](CarId id) {
    const VehicleState& car = world.car(id);
    return Passing{ArrivalKey(car, network),
                   std::max(car.velocity, kArrivalVelocityFloor), car.length};
  };
  const std::size_t n = lists.main_list.size();
  // slot k: ahead of main_list[k] (k == n: behind every known main car).
  std::vector<std::vector<CarId>> ramp_in_slot(n + 1);
  std::size_t slot = 0;
  std::optional<Passing> previous_ramp;
  for (CarId ramp_id : lists.ramp_list) {
    const Passing self = passing_of(ramp_id);
    for (;; ++slot) {
      std::optional<Passing> leader;
      if (previous_ramp && !ramp_in_slot[slot].empty()) {
        leader = previous_ramp;
      } else if (slot > 0) {
        leader = passing_of(lists.main_list[slot - 1]);
      }
      double earliest = self.time;
      if (leader) {
        const double need =
            std::max(DesiredGap(self.velocity,
                                self.velocity - leader->velocity, params),
                     StoppingGap(self.velocity, leader->velocity, params));
        earliest =
            std::max(earliest, leader->time + (need + leader->length) /
                                                  leader->velocity);
      }
      double latest = kInf;
      if (slot < n) {
        const Passing follower = passing_of(lists.main_list[slot]);
        const double need =
            StoppingGap(follower.velocity, self.velocity, params);
        latest = follower.time - (need + self.length) / follower.velocity;
      }
      if (earliest <= latest) {
        ramp_in_slot[slot].push_back(ramp_id);
        previous_ramp = Passing{earliest, self.velocity, self.length};
        break;
      }
    }
  }
  MergePlan plan;
  plan.decided_at = world.time();
  for (std::size_t k = 0; k <= n; ++k) {
    for (CarId id : ramp_in_slot[k]) plan.out_list.push_back(id);
    if (k < n) plan.out_list.push_back(lists.main_list[k]);
  }
  return plan;
}

MergePlan OrderFor(StrategyKind kind, const CarLists& lists, const World& world,
                   const IdmParams& params) {
  switch (kind) {
    case StrategyKind::kPriority:
      return OrderPriority(lists, world, params);
    case StrategyKind::kDistanceBased:
      return OrderDistanceBased(lists, world);
    case StrategyKind::kVelocityBased:
    case StrategyKind::kProactiveVelocity:
      return OrderVelocityBased(lists, world);
  }
  throw std::invalid_argument("OrderFor: unknown strategy");
}

std::optional<std::size_t> SelectGapWindow(std::span<const GapWindow> windows,
                                           double key,
                                           std::size_t first_allowed) {
  for (std::size_t i = first_allowed; i < windows.size(); ++i) {
    if (key < windows[i].hi) return i;
  }
  return std::nullopt;
}

GapAssignment AssignGapAtDecisionPoint(CarId ramp_car, const CarLists& lists,
                                       const World& world, StrategyKind kind,
                                       const MergePlan& plan) {
  const RoadNetwork& network = world.network();
  const KeyFn key =
      kind == StrategyKind::kDistanceBased ? &DistanceKey : &ArrivalKey;
  const std::size_t n = lists.main_list.size();

  std::vector<GapWindow> windows;
  windows.reserve(n + 1);
  double lo = -kInf;
  for (CarId id : lists.main_list) {
    const double hi = key(world.car(id), network);
    windows.push_back({lo, hi});
    lo = hi;
  }
  windows.push_back({lo, kInf});

  // The nearest assigned ramp car ahead bounds the earliest slot.
  std::size_t first_allowed = 0;
  auto self = std::find(lists.ramp_list.begin(), lists.ramp_list.end(), ramp_car);
  for (auto it = self; it != lists.ramp_list.begin();) {
    --it;
    auto assigned = plan.gap_assignment.find(*it);
    if (assigned == plan.gap_assignment.end()) continue;
    const auto& follower = assigned->second.follower;
    if (!follower) {
      first_allowed = n;
    } else {
      auto pos = std::find(lists.main_list.begin(), lists.main_list.end(),
                           *follower);
      if (pos != lists.main_list.end()) {
        first_allowed = static_cast<std::size_t>(pos - lists.main_list.begin());
      }
    }
    break;
  }

  const double own_key = key(world.car(ramp_car), network);
  const std::size_t slot =
      SelectGapWindow(windows, own_key, first_allowed).value_or(n);
  GapAssignment assignment;
  if (slot > 0) assignment.leader = lists.main_list[slot - 1];
  if (slot < n) assignment.follower = lists.main_list[slot];
  return assignment;
}

double ProactiveAccelCommand(const VehicleState& ramp_car,
                             const GapAssignment& assignment,
                             const World& world, const IdmParams& params) {
  const double v = ramp_car.velocity;
  double command =
      IdmTrackingAcceleration(v, EffectiveLeader(ramp_car, world), params);
  if (assignment.leader) {
    if (auto index = world.index_of(*assignment.leader)) {
      const VehicleState& leader = world.cars()[*index];
      if (leader.road == Road::kMainLoop) {
        const RoadNetwork& network = world.network();
        const double own_distance =
            DistanceToPoint(ramp_car, network.merge_start, network);
        // Leaders still short of O are placed where they will be relative to
        // this car when they reach O, so the gap is an arrival-time headway
        // expressed at the car's own speed.
        const double leader_offset = OffsetFromMergeStart(leader, network);
        double lead = leader_offset;
        if (leader_offset < 0.0) {
          lead = -v * -leader_offset /
                 std::max(leader.velocity, kArrivalVelocityFloor);
        }
        const double gap = own_distance + lead - leader.length;
        const double track = IdmTrackingAcceleration(
            v, MakeLeaderView(v, gap, leader.velocity), params);
        command = std::min(command, track);
      }
    }
  }
  return ClampCommand(command, params);
}

std::unordered_map<CarId, LeaderView> EnforceOrderOnMain(const MergePlan& plan,
                                                         const World& world,
                                                         StrategyKind kind) {
  std::unordered_map<CarId, LeaderView> overrides;
  if (kind == StrategyKind::kPriority) return overrides;
  const RoadNetwork& network = world.network();
  for (const auto& [ramp_id, assignment] : plan.gap_assignment) {
    const auto ramp_index = world.index_of(ramp_id);
    std::optional<std::size_t> follower_index;
    if (assignment.follower) {
      follower_index = world.index_of(*assignment.follower);
    } else if (assignment.leader) {
      follower_index = MainFollowerOf(world, *assignment.leader);
    }
    if (!ramp_index || !follower_index) continue;
    const VehicleState& ramp_car = world.cars()[*ramp_index];
    const VehicleState& follower = world.cars()[*follower_index];
    if (ramp_car.road != Road::kRamp || follower.road != Road::kMainLoop) {
      continue;
    }
    const double ramp_offset = OffsetFromMergeStart(ramp_car, network);
    const double follower_offset = OffsetFromMergeStart(follower, network);
    double lead = ramp_offset;
    double lead_velocity = ramp_car.velocity;
    if (ramp_offset < 0.0) {
      // Same arrival-time projection as the ramp side: the ramp car sits
      // where its arrival at O puts it at the follower's own speed.
      lead = -follower.velocity * -ramp_offset /
             std::max(ramp_car.velocity, kArrivalVelocityFloor);
      lead_velocity = follower.velocity;
    }
    if (lead <= follower_offset) continue;
    const LeaderView view = MakeLeaderView(
        follower.velocity,
        lead - follower_offset - ramp_car.length - kYieldMargin,
        lead_velocity);
    auto [it, inserted] = overrides.emplace(follower.id, view);
    if (!inserted && view.gap < it->second.gap) it->second = view;
  }
  return overrides;
}

std::optional<World> ExecuteMerge(CarId ramp_car, const World& world,
                                  const IdmParams& params, StrategyKind kind) {
  const VehicleState& car = world.car(ramp_car);
  const RoadNetwork& network = world.network();
  if (car.road != Road::kRamp || car.position < network.ramp_merge_start()) {
    return std::nullopt;
  }
  const InsertionCheck check = CheckInsertion(car, world, params);
  if (!(kind == StrategyKind::kPriority ? check.priority : check.safe)) {
    return std::nullopt;
  }
  std::vector<VehicleState> cars(world.cars().begin(), world.cars().end());
  for (VehicleState& c : cars) {
    if (c.id != ramp_car) continue;
    c.position = ProjectOntoLoop(c, network);
    c.road = Road::kMainLoop;
    c.merged_at = world.time();
  }
  return World(network, std::move(cars), world.time());
}

double SlidingDecisionOffset(double mean_main_velocity,
                             const RoadNetwork& network,
                             const IdmParams& params, double k) {
  return std::clamp(k * mean_main_velocity * params.time_headway, 0.0,
                    network.ramp_merge_start());
}

}  // namespace onramp
