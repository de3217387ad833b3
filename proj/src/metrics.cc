#include "onramp/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace onramp {

void AccelStats::Add(double acceleration) {
  sum_abs_ += std::abs(acceleration);
  ++samples_;
  if (acceleration <= kHardDecelThreshold) ++hard_events_;
}

void AccelStats::Merge(const AccelStats& other) {
  sum_abs_ += other.sum_abs_;
  samples_ += other.samples_;
  hard_events_ += other.hard_events_;
}

double AccelStats::mean_abs() const {
  return samples_ == 0 ? 0.0 : sum_abs_ / static_cast<double>(samples_);
}

AccelStats ComputeAccelStats(std::span<const double> accelerations) {
  AccelStats stats;
  for (double a : accelerations) stats.Add(a);
  return stats;
}

double MeanMainVelocity(const World& world) {
  if (world.main_count() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t index : world.main_order()) {
    sum += world.cars()[index].velocity;
  }
  return sum / static_cast<double>(world.main_count());
}

double Flow(const World& world) {
  const double density = static_cast<double>(world.main_count()) /
                         world.network().loop_length;
  return density * MeanMainVelocity(world);
}

std::optional<double> LatencyToFill(std::span<const double> merge_times,
                                    std::int64_t n) {
  if (n < 0) throw std::invalid_argument("LatencyToFill: n must be >= 0");
  if (n == 0) return 0.0;
  if (static_cast<std::size_t>(n) > merge_times.size()) return std::nullopt;
  std::vector<double> sorted(merge_times.begin(), merge_times.end());
  std::nth_element(sorted.begin(), sorted.begin() + (n - 1), sorted.end());
  return sorted[static_cast<std::size_t>(n - 1)];
}

std::int64_t Throughput(std::span<const double> merge_times, double t0,
                        double t1) {
  if (t0 > t1) throw std::invalid_argument("Throughput: t0 > t1");
  return std::count_if(merge_times.begin(), merge_times.end(),
                       [=](double t) { return t >= t0 && t < t1; });
}

std::vector<double> MergeTimes(std::span<const CarRecord> records) {
  std::vector<double> times;
  for (const CarRecord& r : records) {
    if (r.merge_t) times.push_back(*r.merge_t);
  }
  return times;
}

std::vector<std::int64_t> LatencyLevels(std::int64_t merged_total) {
  std::vector<std::int64_t> levels;
  for (std::int64_t n = 10; n <= merged_total; n += 10) levels.push_back(n);
  if (merged_total < 100) levels.push_back(100);
  return levels;
}

RunSummary Summarize(std::span<const MetricsFrame> frames,
                     std::span<const CarRecord> records,
                     const AccelStats& overall, double sample_interval) {
  RunSummary summary;
  const std::vector<double> merges = MergeTimes(records);
  summary.total_throughput = static_cast<std::int64_t>(merges.size());
  for (std::int64_t n : LatencyLevels(summary.total_throughput)) {
    summary.latency_to_fill[n] = LatencyToFill(merges, n);
  }
  for (const MetricsFrame& f : frames) {
    summary.peak_flow = std::max(summary.peak_flow, f.flow);
    if (f.mean_velocity > 20.0) summary.time_above_20ms += sample_interval;
  }
  summary.mean_abs_accel_overall = overall.mean_abs();
  summary.hard_decel_events = overall.hard_decel_events();
  for (const CarRecord& r : records) {
    if (r.merge_t) summary.per_car_ramp_transit.push_back(*r.merge_t - r.spawn_t);
  }
  return summary;
}

CellAggregate AggregateCell(std::span<const MetricsFrame> frames,
                            std::span<const CarRecord> records) {
  CellAggregate cell;
  const std::vector<double> merges = MergeTimes(records);
  cell.latency_to_fill_100 = LatencyToFill(merges, 100);
  cell.merged_total = static_cast<std::int64_t>(merges.size());
  if (frames.empty()) return cell;
  double flow = 0.0;
  double velocity = 0.0;
  double accel = 0.0;
  std::size_t accel_frames = 0;
  double fast_flow = 0.0;
  std::size_t fast_frames = 0;
  for (const MetricsFrame& f : frames) {
    flow += f.flow;
    velocity += f.mean_velocity;
    if (f.t > 0.0) {
      accel += f.mean_abs_accel;
      ++accel_frames;
    }
    if (f.mean_velocity > 20.0) {
      fast_flow += f.flow;
      ++fast_frames;
    }
  }
  const double count = static_cast<double>(frames.size());
  cell.mean_flow = flow / count;
  cell.mean_velocity = velocity / count;
  if (accel_frames > 0) cell.mean_abs_accel = accel / static_cast<double>(accel_frames);
  if (fast_frames > 0) cell.flow_above_20ms = fast_flow / static_cast<double>(fast_frames);
  return cell;
}

}  // namespace onramp
