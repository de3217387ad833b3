#include "onramp/dynamics.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace onramp {
namespace {

// Textbook IDM, written out here so the library is checked against an
// independent evaluation.
double OracleIdm(double v, double gap, double dv) {
  const double v0 = 100.0 / 3.6, t = 1.5, a = 1.0, b = 3.0, s0 = 2.0;
  const double dyn = v * t + v * dv / (2.0 * std::sqrt(a * b));
  const double s_star = s0 + (dyn > 0.0 ? dyn : 0.0);
  const double raw =
      a * (1.0 - std::pow(v / v0, 4.0) - (s_star / gap) * (s_star / gap));
  return std::fmin(a, std::fmax(-b, raw));
}

VehicleState Car(CarId id, Road road, double position, double velocity) {
  VehicleState car;
  car.id = id;
  car.road = road;
  car.position = position;
  car.velocity = velocity;
  return car;
}

TEST(DesiredGapTest, Examples) {
  const IdmParams p;
  EXPECT_DOUBLE_EQ(DesiredGap(0, 0, p), 2);
  EXPECT_NEAR(DesiredGap(27.78, 0, p), 43.67, 1e-9);
  EXPECT_DOUBLE_EQ(DesiredGap(20, -30, p), 2);
}

TEST(DesiredGapTest, NeverBelowMinimumDistance) {
  const IdmParams p;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> v(0, 40), dv(-40, 40);
  for (int i = 0; i < 10000; ++i) ASSERT_GE(DesiredGap(v(rng), dv(rng), p), 2.0);
}

TEST(IdmAccelerationTest, Examples) {
  const IdmParams p;
  EXPECT_NEAR(IdmAcceleration(p.desired_velocity, LeaderView::FreeRoad(), p), 0,
              1e-12);
  EXPECT_DOUBLE_EQ(IdmAcceleration(0, MakeLeaderView(0, 2, 0), p), 0);
  // v = 20, gap = 30, dv = 5: s* = 2 + 30 + 100 / 3.4641 = 60.868; raw value
  // 1 - 0.2687 - 4.1166 = -3.385, clamped to -b.
  const double a = IdmAcceleration(20, MakeLeaderView(20, 30, 15), p);
  EXPECT_NEAR(a, OracleIdm(20, 30, 5), 1e-12);
  EXPECT_DOUBLE_EQ(a, -3.0);
  // Milder case inside the clamp: v = 20, gap = 60, dv = 0 gives s* = 32 and
  // 1 - 0.2687 - 0.2844 = 0.4469.
  EXPECT_NEAR(IdmAcceleration(20, MakeLeaderView(20, 60, 20), p), 0.4469, 1e-4);
}

TEST(IdmAccelerationTest, MatchesOracleAndClamp) {
  const IdmParams p;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> v(0, 30), gap(0.5, 300), dv(-15, 15);
  for (int i = 0; i < 10000; ++i) {
    const double vi = v(rng), gi = gap(rng), di = dv(rng);
    const double a = IdmAcceleration(vi, MakeLeaderView(vi, gi, vi - di), p);
    ASSERT_NEAR(a, OracleIdm(vi, gi, di), 1e-12);
    ASSERT_GE(a, -p.max_deceleration);
    ASSERT_LE(a, p.max_acceleration);
  }
}

TEST(IdmAccelerationTest, MonotoneInGap) {
  const IdmParams p;
  for (double v : {0.0, 5.0, 15.0, 25.0, 30.0}) {
    for (double dv : {-10.0, 0.0, 10.0}) {
      double previous = -INFINITY;
      for (int k = 0; k < 1000; ++k) {
        const double a =
            IdmAcceleration(v, MakeLeaderView(v, 0.5 + 0.25 * k, v - dv), p);
        ASSERT_GE(a, previous) << "v=" << v << " dv=" << dv << " k=" << k;
        previous = a;
      }
    }
  }
}

TEST(IdmAccelerationTest, RejectsCollision) {
  const IdmParams p;
  EXPECT_THROW(IdmAcceleration(10, MakeLeaderView(10, 0, 10), p),
               std::domain_error);
  EXPECT_DOUBLE_EQ(IdmTrackingAcceleration(10, MakeLeaderView(10, -5, 10), p),
                   -p.max_deceleration);
}

TEST(IdmParamsTest, Validate) {
  EXPECT_NO_THROW(IdmParams{}.Validate());
  IdmParams p;
  p.exponent = 0.5;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  p = IdmParams{};
  p.min_distance = 0;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
}

TEST(EquilibriumVelocityTest, AgreesWithOracleBisection) {
  const IdmParams p;
  for (double gap : {3.0, 10.0, 45.0, 95.0, 195.0, 1000.0}) {
    double lo = 0, hi = p.desired_velocity;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (OracleIdm(mid, gap, 0) > 0 ? lo : hi) = mid;
    }
    EXPECT_NEAR(EquilibriumVelocity(gap, p), lo, 1e-9) << gap;
  }
  EXPECT_THROW(EquilibriumVelocity(0, p), std::invalid_argument);
}

TEST(EffectiveLeaderTest, VirtualStopAndRealLeaders) {
  const RoadNetwork network;  // E at ramp coordinate 400.
  const World lone(network, {Car(0, Road::kRamp, 300, 12)});
  const LeaderView stop = EffectiveLeader(lone.car(0), lone);
  EXPECT_DOUBLE_EQ(stop.gap, 100);
  EXPECT_DOUBLE_EQ(stop.leader_velocity, 0);
  EXPECT_DOUBLE_EQ(stop.closing_speed, 12);

  const World ramp(network,
                   {Car(0, Road::kRamp, 300, 12), Car(1, Road::kRamp, 325, 8)});
  const LeaderView real = EffectiveLeader(ramp.car(0), ramp);
  EXPECT_DOUBLE_EQ(real.gap, 20);
  EXPECT_DOUBLE_EQ(real.leader_velocity, 8);

  const World loop(network, {Car(0, Road::kMainLoop, 100, 20),
                             Car(1, Road::kMainLoop, 150, 18)});
  const LeaderView main = EffectiveLeader(loop.car(0), loop);
  EXPECT_DOUBLE_EQ(main.gap, 45);
  EXPECT_DOUBLE_EQ(main.closing_speed, 2);
}

TEST(StepWorldTest, IntegratorExamples) {
  const IdmParams p;
  const RoadNetwork network;
  const World rest(network, {Car(0, Road::kMainLoop, 10, 0)});
  const double one[] = {1.0};
  const World moved = StepWorld(rest, 0.1, one, p);
  EXPECT_NEAR(moved.car(0).velocity, 0.1, 1e-15);
  EXPECT_NEAR(moved.car(0).position, 10.005, 1e-12);
  EXPECT_NEAR(moved.car(0).acceleration, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(moved.time(), 0.1);

  const World cruise(network, {Car(0, Road::kMainLoop, 9990, p.desired_velocity)});
  const double zero[] = {0.0};
  EXPECT_NEAR(StepWorld(cruise, 0.1, zero, p).car(0).position,
              WrapPosition(9990 + p.desired_velocity * 0.1, 10000), 1e-9);

  const World slow(network, {Car(0, Road::kMainLoop, 10, 0.05)});
  const double brake[] = {-3.0};
  const World stopped = StepWorld(slow, 0.1, brake, p);
  EXPECT_EQ(stopped.car(0).velocity, 0.0);
  EXPECT_NEAR(stopped.car(0).position, 10.0025, 1e-12);
}

TEST(StepWorldTest, ClampsCommandsAndStopsAtE) {
  const IdmParams p;
  const RoadNetwork network;
  const World w(network, {Car(0, Road::kMainLoop, 0, 10),
                          Car(1, Road::kRamp, 399.9, 5)});
  const double commands[] = {50.0, 0.0};
  const World next = StepWorld(w, 0.1, commands, p);
  EXPECT_NEAR(next.car(0).velocity, 10.1, 1e-12);
  EXPECT_LE(next.car(1).position, network.ramp_length);
  const double wrong_size[] = {0.0};
  EXPECT_THROW(StepWorld(w, 0.1, wrong_size, p), std::invalid_argument);
  EXPECT_THROW(StepWorld(w, 0.0, commands, p), std::invalid_argument);
}

TEST(StepWorldTest, Deterministic) {
  const IdmParams p;
  std::vector<VehicleState> cars;
  for (int i = 0; i < 30; ++i) {
    cars.push_back(Car(i, Road::kMainLoop, i * 300.0, 10.0 + (i % 7)));
  }
  World a(RoadNetwork{}, cars), b(RoadNetwork{}, cars);
  for (int i = 0; i < 500; ++i) {
    a = StepWorld(a, 0.1, p);
    b = StepWorld(b, 0.1, p);
  }
  for (std::size_t i = 0; i < a.cars().size(); ++i) {
    ASSERT_EQ(a.cars()[i].position, b.cars()[i].position);
    ASSERT_EQ(a.cars()[i].velocity, b.cars()[i].velocity);
  }
}

TEST(FreeFlowTest, LoneCarConvergesToDesiredVelocity) {
  const IdmParams p;
  World w(RoadNetwork{}, {Car(0, Road::kMainLoop, 0, 0)});
  for (int i = 0; i < 6000; ++i) {
    w = StepWorld(w, 0.1, p);
    ASSERT_LE(w.car(0).velocity, p.desired_velocity * (1 + 1e-9));
  }
  EXPECT_NEAR(w.car(0).velocity, p.desired_velocity, 1e-3 * p.desired_velocity);
}

TEST(PlatoonTest, EquilibriumRingIsStationary) {
  const IdmParams p;
  const int n = 150;
  const double spacing = 10000.0 / n;
  const double v = EquilibriumVelocity(spacing - 5.0, p);
  std::vector<VehicleState> cars;
  for (int i = 0; i < n; ++i) {
    cars.push_back(Car(i, Road::kMainLoop, i * spacing, v));
  }
  World w(RoadNetwork{}, cars);
  for (int step = 0; step < 600; ++step) {
    w = StepWorld(w, 0.1, p);
    for (const VehicleState& car : w.cars()) {
      ASSERT_LT(std::abs(car.acceleration), 1e-6);
    }
  }
}

// Stop-and-go platoon under the hard braking floor: the safe-command cap must
// keep every gap positive.
TEST(SafeAccelerationTest, DenseRandomPlatoonStaysCollisionFree) {
  const IdmParams p;
  std::mt19937_64 rng(5);
  // Initial speeds low enough that every pair can still stop in its gap.
  std::uniform_real_distribution<double> speed(0.0, 8.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<VehicleState> cars;
    for (int i = 0; i < 400; ++i) {
      cars.push_back(Car(i, Road::kMainLoop, i * 25.0, speed(rng)));
    }
    World w(RoadNetwork{}, cars);
    for (int step = 0; step < 3000; ++step) {
      w = StepWorld(w, 0.1, p);
      ASSERT_NO_THROW(w.CheckCollisionFree()) << "trial " << trial;
    }
  }
}

TEST(SafeAccelerationTest, BrakingAtTheCapStopsOutsideMinimumDistance) {
  const IdmParams p;
  const double dt = 0.1;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> v(0, 30), gap(2.0, 120);
  for (int trial = 0; trial < 2000; ++trial) {
    double vf = v(rng), vl = v(rng), g = gap(rng);
    const double cap = SafeAcceleration(vf, MakeLeaderView(vf, g, vl), dt, p);
    if (!(cap >= -p.max_deceleration)) continue;  // Already infeasible.
    // Apply the cap once, then both brake at b until stopped.
    double a = std::min(cap, p.max_acceleration);
    for (int step = 0; step < 400; ++step) {
      const double vf_next = std::max(0.0, vf + a * dt);
      const double vl_next = std::max(0.0, vl - p.max_deceleration * dt);
      g += 0.5 * (vl + vl_next) * dt - 0.5 * (vf + vf_next) * dt;
      vf = vf_next;
      vl = vl_next;
      a = -p.max_deceleration;
    }
    ASSERT_GE(g, p.min_distance - 1e-9) << "trial " << trial;
  }
}

TEST(SafeAccelerationTest, InactiveInEquilibrium) {
  const IdmParams p;
  for (double gap : {5.0, 20.0, 45.0, 95.0}) {
    const double v = EquilibriumVelocity(gap, p);
    EXPECT_GT(SafeAcceleration(v, MakeLeaderView(v, gap, v), 0.1, p), 0.0);
  }
  EXPECT_EQ(SafeAcceleration(10, LeaderView::FreeRoad(), 0.1, p), INFINITY);
}

}  // namespace
}  // namespace onramp
