#pragma once

#include <string>
#include <vector>

#include "onramp/strategies.h"
#include "onramp/world.h"

namespace onramp::testing {

// Five cars approaching O on the default network: loop cars c, d, e and ramp
// cars x, y, with ids 0..4 in that order. Distances to O are c 20, x 40,
// d 60, y 80, e 130 m; everyone drives at `common_velocity` except x.
inline World ExampleScene(double common_velocity, double x_velocity) {
  const RoadNetwork network;
  auto loop_car = [&](CarId id, double distance) {
    VehicleState car;
    car.id = id;
    car.road = Road::kMainLoop;
    car.position = WrapPosition(network.merge_start - distance,
                                network.loop_length);
    car.velocity = common_velocity;
    return car;
  };
  auto ramp_car = [&](CarId id, double distance, double velocity) {
    VehicleState car;
    car.id = id;
    car.road = Road::kRamp;
    car.position = network.ramp_merge_start() - distance;
    car.velocity = velocity;
    return car;
  };
  return World(network,
               {loop_car(0, 20.0), loop_car(1, 60.0), loop_car(2, 130.0),
                ramp_car(3, 40.0, x_velocity),
                ramp_car(4, 80.0, common_velocity)});
}

inline std::string ExampleNames(const std::vector<CarId>& ids) {
  static const char kNames[] = {'c', 'd', 'e', 'x', 'y'};
  std::string out;
  for (CarId id : ids) out += kNames[id];
  return out;
}

}  // namespace onramp::testing
