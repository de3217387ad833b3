#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace onramp {

using CarId = std::int64_t;

enum class Road { kMainLoop, kRamp };

/// Closed main loop plus a single on-ramp.
///
/// The ramp runs from its entry (ramp coordinate 0) to E (ramp coordinate
/// ramp_length). Its last stretch, the merge section, lies alongside the loop
/// between O and E. Ramp and loop coordinates are joined at O, so a ramp car at
/// ramp coordinate r projects onto loop position O + (r - ramp_merge_start()).
struct RoadNetwork {
  double loop_length = 10000.0;
  double ramp_length = 400.0;
  double merge_start = 0.0;  // O, loop coordinate.
  double merge_end = 100.0;  // E, loop coordinate.
  // Distance from the decision point D to O, measured upstream along the ramp.
  double decision_offset = 200.0;

  /// Builds a network with O placed at `merge_start` and E `merge_section`
  /// meters downstream of it.
  static RoadNetwork Make(double loop_length, double ramp_length,
                          double merge_section, double decision_offset,
                          double merge_start = 0.0);

  double merge_section_length() const;
  /// Ramp coordinate of O.
  double ramp_merge_start() const {
    return ramp_length - merge_section_length();
  }
  /// Ramp coordinate of D.
  double ramp_decision_point() const {
    return ramp_merge_start() - decision_offset;
  }

  /// Throws std::invalid_argument naming the violated constraint.
  void Validate() const;
};

struct VehicleState {
  CarId id = 0;
  Road road = Road::kMainLoop;
  double position = 0.0;  // Front bumper, meters along `road`.
  double velocity = 0.0;
  double acceleration = 0.0;  // Realized over the last step.
  double length = 5.0;
  std::optional<double> merged_at;
};

/// Raised when two consecutive cars on the same road overlap.
class CollisionError : public std::runtime_error {
 public:
  CollisionError(CarId follower, CarId leader, double time, double gap);

  CarId follower() const { return follower_; }
  CarId leader() const { return leader_; }
  double time() const { return time_; }
  double gap() const { return gap_; }

 private:
  CarId follower_;
  CarId leader_;
  double time_;
  double gap_;
};

/// Wraps `x` into [0, loop_length). Throws on non-finite input.
double WrapPosition(double x, double loop_length);

/// Bumper-to-bumper distance from the follower's front to the leader's rear.
/// On the loop the arc wraps. A car passed as its own leader (a ring of one)
/// yields loop_length - length.
double NetGap(const VehicleState& follower, const VehicleState& leader,
              const RoadNetwork& network);

/// Signed offset of a car from O along its path. Ramp cars: ramp coordinate
/// minus the ramp coordinate of O. Loop cars: the shortest signed arc from O,
/// so cars up to half a loop upstream are negative.
double OffsetFromMergeStart(const VehicleState& car, const RoadNetwork& network);

/// Along-path distance from the car to the loop coordinate `point`. Zero when
/// the car is at or past the point inside the merge section. Throws
/// std::invalid_argument when the point is not on the car's path.
double DistanceToPoint(const VehicleState& car, double point,
                       const RoadNetwork& network);

/// Loop coordinate a ramp car would occupy if it merged now.
double ProjectOntoLoop(const VehicleState& ramp_car, const RoadNetwork& network);

/// Immutable snapshot of every car plus the network they drive on.
class World {
 public:
  World() = default;
  World(RoadNetwork network, std::vector<VehicleState> cars, double time = 0.0);

  const RoadNetwork& network() const { return network_; }
  double time() const { return time_; }
  std::span<const VehicleState> cars() const { return cars_; }

  /// Throws std::out_of_range for an unknown id.
  const VehicleState& car(CarId id) const;
  std::optional<std::size_t> index_of(CarId id) const;

  /// Indices into cars() of loop cars in ascending position order.
  const std::vector<std::size_t>& main_order() const { return main_order_; }
  /// Indices into cars() of ramp cars, front-most first.
  const std::vector<std::size_t>& ramp_order() const { return ramp_order_; }

  std::size_t main_count() const { return main_order_.size(); }
  std::size_t ramp_count() const { return ramp_order_.size(); }

  /// Index of the next car ahead on the same road. For loop cars this wraps and
  /// a lone car is its own leader; the front-most ramp car has no leader.
  std::optional<std::size_t> leader_index(std::size_t index) const;

  /// Throws CollisionError on the first overlapping same-road pair.
  void CheckCollisionFree() const;

 private:
  RoadNetwork network_;
  std::vector<VehicleState> cars_;  // Sorted by id.
  std::vector<std::size_t> main_order_;
  std::vector<std::size_t> ramp_order_;
  std::vector<std::size_t> main_rank_;  // cars_ index -> slot in main_order_.
  std::vector<std::size_t> ramp_rank_;
  double time_ = 0.0;
};

/// Knowledge limit of a strategy: at most `limit` cars within `range` meters.
struct KnowledgeHorizon {
  std::size_t limit = 8;
  double range = 400.0;
};

struct CarLists {
  std::vector<CarId> ramp_list;  // Unmerged ramp cars, front-most first.
  std::vector<CarId> main_list;  // Loop cars at or approaching O, nearest first.
  std::vector<CarId> out_list;
};

CarLists BuildCarLists(const World& world, const KnowledgeHorizon& horizon = {});

}  // namespace onramp
