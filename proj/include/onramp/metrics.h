#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "onramp/world.h"

namespace onramp {

/// Commands at or below this count as hard braking.
inline constexpr double kHardDecelThreshold = -2.0;

struct MetricsFrame {
  double t = 0.0;
  std::int64_t n_main = 0;
  std::int64_t n_ramp = 0;
  std::int64_t ramp_queue = 0;
  std::int64_t merged_total = 0;
  double density = 0.0;        // cars/m
  double mean_velocity = 0.0;  // space mean over loop cars, m/s
  double flow = 0.0;           // cars/s, density * mean_velocity
  double mean_abs_accel = 0.0; // over loop-car accelerations since the last frame
  std::int64_t hard_decel_events = 0;  // cumulative
};

/// Lifecycle of one ramp car.
struct CarRecord {
  CarId id = 0;
  double spawn_t = 0.0;
  std::optional<double> decision_t;
  std::optional<double> merge_t;
  double entry_v = 0.0;
  std::optional<double> merge_v;
};

/// Running |a| statistics over loop-car accelerations. Every sample spans the same
/// dt, so the time-weighted mean is the sample mean.
class AccelStats {
 public:
  void Add(double acceleration);
  void Merge(const AccelStats& other);

  double mean_abs() const;
  std::int64_t hard_decel_events() const { return hard_events_; }
  std::int64_t samples() const { return samples_; }

 private:
  double sum_abs_ = 0.0;
  std::int64_t samples_ = 0;
  std::int64_t hard_events_ = 0;
};

AccelStats ComputeAccelStats(std::span<const double> accelerations);

/// Loop density times space-mean velocity; zero for an empty loop.
double Flow(const World& world);
double MeanMainVelocity(const World& world);

/// Time at which cumulative merges first reach `n`: 0 for n == 0, nullopt if
/// never reached. `merge_times` need not be sorted. Throws for n < 0.
std::optional<double> LatencyToFill(std::span<const double> merge_times,
                                    std::int64_t n);

/// Merges with t0 <= t < t1. Throws when t0 > t1.
std::int64_t Throughput(std::span<const double> merge_times, double t0,
                        double t1);

std::vector<double> MergeTimes(std::span<const CarRecord> records);

struct RunSummary {
  std::map<std::int64_t, std::optional<double>> latency_to_fill;
  std::int64_t total_throughput = 0;
  double peak_flow = 0.0;
  double time_above_20ms = 0.0;
  double mean_abs_accel_overall = 0.0;
  std::int64_t hard_decel_events = 0;
  std::vector<double> per_car_ramp_transit;
};

/// Fill levels reported in the latency curve: every multiple of 10 up to the
/// total merges, plus 100.
std::vector<std::int64_t> LatencyLevels(std::int64_t merged_total);

RunSummary Summarize(std::span<const MetricsFrame> frames,
                     std::span<const CarRecord> records,
                     const AccelStats& overall, double sample_interval);

/// Per-cell values of a sweep table, computed from frames and records alone.
struct CellAggregate {
  std::optional<double> latency_to_fill_100;
  double mean_flow = 0.0;
  double mean_velocity = 0.0;
  double mean_abs_accel = 0.0;  // mean over frames after t = 0
  std::int64_t merged_total = 0;
  double flow_above_20ms = 0.0;  // mean flow over frames with v > 20 m/s
};

CellAggregate AggregateCell(std::span<const MetricsFrame> frames,
                            std::span<const CarRecord> records);

}  // namespace onramp
