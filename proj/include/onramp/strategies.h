#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "onramp/dynamics.h"
#include "onramp/world.h"

namespace onramp {

enum class StrategyKind {
  kPriority,           // R: main road has right of way, decide at O.
  kDistanceBased,      // D: closest to O first, decided at D.
  kVelocityBased,      // V: earliest predicted arrival at O first.
  kProactiveVelocity,  // PV: V plus speed adjustment between D and O.
};

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::kPriority, StrategyKind::kDistanceBased,
    StrategyKind::kVelocityBased, StrategyKind::kProactiveVelocity};

std::string_view StrategyName(StrategyKind kind);
std::optional<StrategyKind> ParseStrategyKind(std::string_view name);

/// True for strategies that fix a merge order at the decision point.
inline bool DecidesAhead(StrategyKind kind) {
  return kind != StrategyKind::kPriority;
}

/// Main-road cars that will bracket a ramp car after it merges.
struct GapAssignment {
  std::optional<CarId> leader;
  std::optional<CarId> follower;

  bool operator==(const GapAssignment&) const = default;
};

struct MergePlan {
  std::vector<CarId> out_list;
  std::map<CarId, GapAssignment> gap_assignment;
  double decided_at = 0.0;
};

/// Minimum arrival-time velocity; crawling cars are predicted as very late.
inline constexpr double kArrivalVelocityFloor = 0.1;

/// Constant-velocity time for `car` to reach loop coordinate `point`.
double PredictArrivalTime(const VehicleState& car, double point,
                          const RoadNetwork& network);

/// Clearances a ramp car would have if it moved onto the loop now.
struct InsertionCheck {
  std::optional<CarId> leader;
  std::optional<CarId> follower;
  double front_gap = 0.0;
  double rear_gap = 0.0;
  bool safe = false;      // Both pairs can stop by braking at b.
  bool priority = false;  // safe, and the front gap also covers s*(v, dv).
};

/// Evaluates insertion of `ramp_car` at its loop projection against the
/// current loop cars.
///
/// Both pairs must be able to stop s0 apart when braking at b:
/// gap >= s0 + max(0, v_follower^2 - v_leader^2) / 2b. Priority additionally
/// needs front gap >= s*(v, v - v_leader).
InsertionCheck CheckInsertion(const VehicleState& ramp_car, const World& world,
                              const IdmParams& params);

bool PriorityCanMerge(const VehicleState& ramp_car, const World& world,
                      const IdmParams& params);

/// Out list sorted by distance to O, ties main-road first.
MergePlan OrderDistanceBased(const CarLists& lists, const World& world);

/// Out list sorted by predicted arrival at O via a stable merge of the two
/// per-road sequences (head-vs-head comparison), ties main-road first.
MergePlan OrderVelocityBased(const CarLists& lists, const World& world);

/// Out list under right-of-way for the main road: each ramp car, in ramp
/// order, takes the first main gap that opens wide enough for PriorityCanMerge
/// while it waits at O, with every car extrapolated at constant velocity.
MergePlan OrderPriority(const CarLists& lists, const World& world,
                        const IdmParams& params);

MergePlan OrderFor(StrategyKind kind, const CarLists& lists, const World& world,
                   const IdmParams& params);

/// Window of ordering keys (distance or predicted time at O) between two
/// consecutive main-road cars.
struct GapWindow {
  double lo;
  double hi;
};

/// Index of the first window at or after `first_allowed` whose upper bound
/// exceeds `key`: the window containing `key` or, when earlier slots are
/// excluded, the nearest later one. A later slot is always reachable since the
/// car can brake. nullopt when no window qualifies.
std::optional<std::size_t> SelectGapWindow(std::span<const GapWindow> windows,
                                           double key,
                                           std::size_t first_allowed = 0);

/// Picks the main-road gap for `ramp_car` at its decision point. Keys are
/// distance to O (distance-based) or predicted arrival (velocity-based). The
/// slot never precedes the slot already assigned to the ramp car ahead.
/// With no main cars in the horizon the gap is unbounded.
GapAssignment AssignGapAtDecisionPoint(CarId ramp_car, const CarLists& lists,
                                       const World& world, StrategyKind kind,
                                       const MergePlan& plan);

/// Ramp command for proactive merging: min(a_safety, a_track), clamped.
/// a_safety follows EffectiveLeader; a_track applies the IDM law to the
/// assigned leader projected onto the ramp through distances to O.
double ProactiveAccelCommand(const VehicleState& ramp_car,
                             const GapAssignment& assignment,
                             const World& world, const IdmParams& params);

/// Leader overrides for main-road followers of not-yet-merged ramp cars whose
/// projection is ahead of them. Empty for the priority strategy.
std::unordered_map<CarId, LeaderView> EnforceOrderOnMain(const MergePlan& plan,
                                                         const World& world,
                                                         StrategyKind kind);

/// Moves `ramp_car` onto the loop if CheckInsertion allows it (priority rules
/// for kPriority). Returns nullopt when the car must keep waiting.
std::optional<World> ExecuteMerge(CarId ramp_car, const World& world,
                                  const IdmParams& params, StrategyKind kind);

/// Sliding decision point: clamp(k v T, 0, ramp coordinate of O).
double SlidingDecisionOffset(double mean_main_velocity,
                             const RoadNetwork& network,
                             const IdmParams& params, double k = 2.0);

}  // namespace onramp
