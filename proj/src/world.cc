#include "onramp/world.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace onramp {

namespace {

std::string CollisionMessage(CarId follower, CarId leader, double time,
                             double gap) {
  std::ostringstream os;
  os << "collision at t=" << time << " s: car " << follower
     << " overlaps leader " << leader << " (net gap " << gap << " m)";
  return os.str();
}

}  // namespace

CollisionError::CollisionError(CarId follower, CarId leader, double time,
                               double gap)
    : std::runtime_error(CollisionMessage(follower, leader, time, gap)),
      follower_(follower),
      leader_(leader),
      time_(time),
      gap_(gap) {}

RoadNetwork RoadNetwork::Make(double loop_length, double ramp_length,
                              double merge_section, double decision_offset,
                              double merge_start) {
  RoadNetwork network;
  network.loop_length = loop_length;
  network.ramp_length = ramp_length;
  network.merge_start = WrapPosition(merge_start, loop_length);
  network.merge_end = WrapPosition(merge_start + merge_section, loop_length);
  network.decision_offset = decision_offset;
  network.Validate();
  return network;
}

double RoadNetwork::merge_section_length() const {
  return WrapPosition(merge_end - merge_start, loop_length);
}

void RoadNetwork::Validate() const {
  if (!(loop_length > 0.0)) {
    throw std::invalid_argument("loop_length_m must be positive");
  }
  if (!(ramp_length > 0.0)) {
    throw std::invalid_argument("ramp_length_m must be positive");
  }
  if (!(merge_start >= 0.0 && merge_start < loop_length) ||
      !(merge_end >= 0.0 && merge_end < loop_length)) {
    throw std::invalid_argument("merge points must lie on the loop");
  }
  const double section = merge_section_length();
  if (!(section > 0.0) || section > ramp_length) {
    throw std::invalid_argument(
        "merge_section_m must be positive and no longer than the ramp");
  }
  if (!(decision_offset >= 0.0) || decision_offset > ramp_merge_start()) {
    throw std::invalid_argument(
        "decision_offset_m must place D between the ramp entry and O");
  }
}

double WrapPosition(double x, double loop_length) {
  if (!std::isfinite(x) || !std::isfinite(loop_length)) {
    throw std::invalid_argument("WrapPosition: non-finite input");
  }
  if (!(loop_length > 0.0)) {
    throw std::invalid_argument("WrapPosition: loop_length must be positive");
  }
  double r = std::fmod(x, loop_length);
  if (r < 0.0) r += loop_length;
  // fmod of a tiny negative can round up to exactly loop_length.
  if (r >= loop_length) r = 0.0;
  return r;
}

double NetGap(const VehicleState& follower, const VehicleState& leader,
              const RoadNetwork& network) {
  if (follower.road != leader.road) {
    throw std::invalid_argument("NetGap: cars are on different roads");
  }
  if (follower.id == leader.id) {
    const bool same_state = follower.position == leader.position &&
                            follower.length == leader.length;
    if (!same_state || follower.road != Road::kMainLoop) {
      throw std::invalid_argument("NetGap: distinct cars share id " +
                                  std::to_string(follower.id));
    }
    return network.loop_length - follower.length;
  }
  if (follower.road == Road::kRamp) {
    return leader.position - leader.length - follower.position;
  }
  return WrapPosition(leader.position - follower.position,
                      network.loop_length) -
         leader.length;
}

double OffsetFromMergeStart(const VehicleState& car,
                            const RoadNetwork& network) {
  if (car.road == Road::kRamp) {
    return car.position - network.ramp_merge_start();
  }
  const double ahead =
      WrapPosition(car.position - network.merge_start, network.loop_length);
  return ahead <= 0.5 * network.loop_length ? ahead
                                            : ahead - network.loop_length;
}

double DistanceToPoint(const VehicleState& car, double point,
                       const RoadNetwork& network) {
  const double section = network.merge_section_length();
  if (car.road == Road::kRamp) {
    // Points on a ramp car's path: ramp entry through E, expressed on the loop.
    const double point_offset =
        WrapPosition(point - network.merge_start, network.loop_length);
    double signed_point = point_offset;
    if (point_offset > section) signed_point -= network.loop_length;
    if (signed_point < -network.ramp_merge_start() || signed_point > section) {
      throw std::invalid_argument(
          "DistanceToPoint: point not reachable from the ramp");
    }
    return std::max(0.0, signed_point - OffsetFromMergeStart(car, network));
  }
  const double past =
      WrapPosition(car.position - point, network.loop_length);
  const double point_into_section =
      WrapPosition(point - network.merge_start, network.loop_length);
  if (point_into_section <= section &&
      past <= section - point_into_section) {
    return 0.0;
  }
  return WrapPosition(point - car.position, network.loop_length);
}

double ProjectOntoLoop(const VehicleState& ramp_car,
                       const RoadNetwork& network) {
  return WrapPosition(
      network.merge_start + OffsetFromMergeStart(ramp_car, network),
      network.loop_length);
}

World::World(RoadNetwork network, std::vector<VehicleState> cars, double time)
    : network_(network), cars_(std::move(cars)), time_(time) {
  std::sort(cars_.begin(), cars_.end(),
            [](const VehicleState& a, const VehicleState& b) {
              return a.id < b.id;
            });
  for (std::size_t i = 0; i < cars_.size(); ++i) {
    if (i > 0 && cars_[i].id == cars_[i - 1].id) {
      throw std::invalid_argument("World: duplicate car id " +
                                  std::to_string(cars_[i].id));
    }
    (cars_[i].road == Road::kMainLoop ? main_order_ : ramp_order_).push_back(i);
  }
  std::sort(main_order_.begin(), main_order_.end(),
            [this](std::size_t a, std::size_t b) {
              if (cars_[a].position != cars_[b].position) {
                return cars_[a].position < cars_[b].position;
              }
              return cars_[a].id < cars_[b].id;
            });
  std::sort(ramp_order_.begin(), ramp_order_.end(),
            [this](std::size_t a, std::size_t b) {
              if (cars_[a].position != cars_[b].position) {
                return cars_[a].position > cars_[b].position;
              }
              return cars_[a].id < cars_[b].id;
            });
  main_rank_.assign(cars_.size(), 0);
  ramp_rank_.assign(cars_.size(), 0);
  for (std::size_t k = 0; k < main_order_.size(); ++k) {
    main_rank_[main_order_[k]] = k;
  }
  for (std::size_t k = 0; k < ramp_order_.size(); ++k) {
    ramp_rank_[ramp_order_[k]] = k;
  }
}

std::optional<std::size_t> World::index_of(CarId id) const {
  auto it = std::lower_bound(
      cars_.begin(), cars_.end(), id,
      [](const VehicleState& car, CarId value) { return car.id < value; });
  if (it == cars_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - cars_.begin());
}

const VehicleState& World::car(CarId id) const {
  auto index = index_of(id);
  if (!index) throw std::out_of_range("unknown car id " + std::to_string(id));
  return cars_[*index];
}

std::optional<std::size_t> World::leader_index(std::size_t index) const {
  if (cars_[index].road == Road::kMainLoop) {
    const std::size_t rank = main_rank_[index];
    return main_order_[(rank + 1) % main_order_.size()];
  }
  const std::size_t rank = ramp_rank_[index];
  if (rank == 0) return std::nullopt;
  return ramp_order_[rank - 1];
}

void World::CheckCollisionFree() const {
  auto check = [this](std::size_t follower, std::size_t leader) {
    const double gap = NetGap(cars_[follower], cars_[leader], network_);
    if (!(gap > 0.0)) {
      throw CollisionError(cars_[follower].id, cars_[leader].id, time_, gap);
    }
  };
  for (std::size_t k = 0; k + 1 < main_order_.size(); ++k) {
    check(main_order_[k], main_order_[k + 1]);
  }
  if (main_order_.size() > 1) check(main_order_.back(), main_order_.front());
  for (std::size_t k = 1; k < ramp_order_.size(); ++k) {
    check(ramp_order_[k], ramp_order_[k - 1]);
  }
}

CarLists BuildCarLists(const World& world, const KnowledgeHorizon& horizon) {
  CarLists lists;
  for (std::size_t index : world.ramp_order()) {
    lists.ramp_list.push_back(world.cars()[index].id);
  }
  struct Candidate {
    double distance;
    CarId id;
  };
  std::vector<Candidate> approaching;
  for (std::size_t index : world.main_order()) {
    const VehicleState& car = world.cars()[index];
    const double offset = OffsetFromMergeStart(car, world.network());
    if (offset <= 0.0 && -offset <= horizon.range) {
      approaching.push_back({-offset, car.id});
    }
  }
  std::sort(approaching.begin(), approaching.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.id < b.id;
            });
  if (approaching.size() > horizon.limit) approaching.resize(horizon.limit);
  for (const Candidate& c : approaching) lists.main_list.push_back(c.id);
  return lists;
}

}  // namespace onramp
