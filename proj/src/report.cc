#include "onramp/report.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "onramp/config.h"

namespace onramp {

namespace {

std::string Optional(const std::optional<double>& value) {
  return value ? FormatDouble(*value) : std::string();
}

std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line = line.substr(comma + 1);
  }
  return fields;
}

template <typename T>
T ParseField(std::string_view field) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::invalid_argument("malformed CSV field '" + std::string(field) +
                                "'");
  }
  return out;
}

std::optional<double> ParseOptional(std::string_view field) {
  if (field.empty()) return std::nullopt;
  return ParseField<double>(field);
}

// Calls `row` with the fields of every data line after checking the header.
template <typename RowFn>
void ForEachRow(std::string_view text, std::string_view header,
                std::size_t columns, RowFn row) {
  bool first = true;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{}
                                             : text.substr(newline + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (first) {
      if (line != header) throw std::invalid_argument("unexpected CSV header");
      first = false;
      continue;
    }
    const auto fields = SplitCsvLine(line);
    if (fields.size() != columns) {
      throw std::invalid_argument("wrong CSV column count");
    }
    row(fields);
  }
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

nlohmann::json OptionalJson(const std::optional<double>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

}  // namespace

std::string FramesCsv(std::span<const MetricsFrame> frames) {
  std::string out(kFramesHeader);
  out += '\n';
  for (const MetricsFrame& f : frames) {
    out += FormatDouble(f.t) + ',' + std::to_string(f.n_main) + ',' +
           std::to_string(f.n_ramp) + ',' + std::to_string(f.ramp_queue) + ',' +
           std::to_string(f.merged_total) + ',' + FormatDouble(f.density) + ',' +
           FormatDouble(f.mean_velocity) + ',' + FormatDouble(f.flow) + ',' +
           FormatDouble(f.mean_abs_accel) + ',' +
           std::to_string(f.hard_decel_events) + '\n';
  }
  return out;
}

std::string EventsCsv(std::span<const CarRecord> records) {
  std::string out(kEventsHeader);
  out += '\n';
  for (const CarRecord& r : records) {
    out += std::to_string(r.id) + ',' + FormatDouble(r.spawn_t) + ',' +
           Optional(r.decision_t) + ',' + Optional(r.merge_t) + ',' +
           FormatDouble(r.entry_v) + ',' + Optional(r.merge_v) + '\n';
  }
  return out;
}

std::vector<MetricsFrame> ParseFramesCsv(std::string_view text) {
  std::vector<MetricsFrame> frames;
  ForEachRow(text, kFramesHeader, 10, [&](const auto& f) {
    MetricsFrame frame;
    frame.t = ParseField<double>(f[0]);
    frame.n_main = ParseField<std::int64_t>(f[1]);
    frame.n_ramp = ParseField<std::int64_t>(f[2]);
    frame.ramp_queue = ParseField<std::int64_t>(f[3]);
    frame.merged_total = ParseField<std::int64_t>(f[4]);
    frame.density = ParseField<double>(f[5]);
    frame.mean_velocity = ParseField<double>(f[6]);
    frame.flow = ParseField<double>(f[7]);
    frame.mean_abs_accel = ParseField<double>(f[8]);
    frame.hard_decel_events = ParseField<std::int64_t>(f[9]);
    frames.push_back(frame);
  });
  return frames;
}

std::vector<CarRecord> ParseEventsCsv(std::string_view text) {
  std::vector<CarRecord> records;
  ForEachRow(text, kEventsHeader, 6, [&](const auto& f) {
    CarRecord r;
    r.id = ParseField<CarId>(f[0]);
    r.spawn_t = ParseField<double>(f[1]);
    r.decision_t = ParseOptional(f[2]);
    r.merge_t = ParseOptional(f[3]);
    r.entry_v = ParseField<double>(f[4]);
    r.merge_v = ParseOptional(f[5]);
    records.push_back(r);
  });
  return records;
}

std::string SummaryJson(const RunResult& result) {
  const RunSummary& s = result.summary;
  nlohmann::ordered_json json;
  json["strategy"] = StrategyName(result.config.strategy);
  json["seed"] = result.config.seed;
  json["initial_main"] = result.initial_main;
  json["arrivals"] = result.arrivals;
  json["total_throughput"] = s.total_throughput;
  nlohmann::ordered_json latency = nlohmann::ordered_json::object();
  for (const auto& [n, t] : s.latency_to_fill) {
    latency[std::to_string(n)] = OptionalJson(t);
  }
  json["latency_to_fill"] = latency;
  json["peak_flow"] = s.peak_flow;
  json["time_above_20ms"] = s.time_above_20ms;
  json["mean_abs_accel_overall"] = s.mean_abs_accel_overall;
  json["hard_decel_events"] = s.hard_decel_events;
  json["per_car_ramp_transit"] = s.per_car_ramp_transit;
  if (result.collision) {
    json["collision"] = {{"follower", result.collision->follower},
                         {"leader", result.collision->leader},
                         {"time", result.collision->time},
                         {"gap", result.collision->gap}};
  } else {
    json["collision"] = nullptr;
  }
  return json.dump(2) + "\n";
}

RunArtifact WriteRunArtifact(const RunResult& result,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  RunArtifact artifact{dir / "config.txt", dir / "frames.csv",
                       dir / "events.csv", dir / "summary.json"};
  WriteFile(artifact.config_path, SerializeConfig(result.config));
  WriteFile(artifact.frames_path, FramesCsv(result.frames));
  WriteFile(artifact.events_path, EventsCsv(result.records));
  WriteFile(artifact.summary_path, SummaryJson(result));
  return artifact;
}

std::optional<SweepParameter> ParseSweepParameter(std::string_view key) {
  if (key == "main_density" || key == "main_density_per_km") {
    return SweepParameter::kMainDensity;
  }
  if (key == "ramp_rate" || key == "ramp_rate_per_min") {
    return SweepParameter::kRampRate;
  }
  if (key == "decision_offset" || key == "decision_offset_m") {
    return SweepParameter::kDecisionOffset;
  }
  if (key == "ramp_length" || key == "ramp_length_m") {
    return SweepParameter::kRampLength;
  }
  return std::nullopt;
}

std::string_view SweepParameterKey(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::kMainDensity:
      return "main_density_per_km";
    case SweepParameter::kRampRate:
      return "ramp_rate_per_min";
    case SweepParameter::kDecisionOffset:
      return "decision_offset_m";
    case SweepParameter::kRampLength:
      return "ramp_length_m";
  }
  return "";
}

ScenarioConfig ApplySweepValue(const ScenarioConfig& base,
                               SweepParameter parameter, double value) {
  ScenarioConfig config = base;
  if (parameter == SweepParameter::kRampLength) {
    const RoadNetwork& n = base.network;
    const double section = n.merge_section_length();
    config.network = RoadNetwork::Make(
        n.loop_length, value, section,
        std::min(n.decision_offset, std::max(0.0, value - section)),
        n.merge_start);
    config.Validate();
    return config;
  }
  SetConfigValue(config, SweepParameterKey(parameter), FormatDouble(value));
  return config;
}

std::vector<SweepRow> RunSweep(const SweepSpec& spec,
                               const std::optional<std::filesystem::path>& out_dir,
                               unsigned jobs) {
  struct Cell {
    double value;
    StrategyKind strategy;
    ScenarioConfig config;
  };
  std::vector<Cell> cells;
  for (double value : spec.values) {
    const ScenarioConfig config =
        ApplySweepValue(spec.base, spec.varied, value);
    for (StrategyKind strategy : spec.strategies) {
      Cell cell{value, strategy, config};
      cell.config.strategy = strategy;
      cells.push_back(std::move(cell));
    }
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      const RunResult result = RunScenario(cell.config);
      if (out_dir) {
        const std::string value_dir = std::string(SweepParameterKey(spec.varied)) +
                                      "_" + FormatDouble(cell.value);
        WriteRunArtifact(result, *out_dir / value_dir /
                                     std::string(StrategyName(cell.strategy)));
      }
      rows[i] = SweepRow{cell.value, cell.strategy,
                         AggregateCell(result.frames, result.records),
                         result.collision};
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return rows;
}

std::string ComparisonCsv(SweepParameter parameter,
                          std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << SweepParameterKey(parameter)
     << ",strategy,latency_to_fill_100,mean_flow,mean_velocity,mean_abs_accel,"
        "merged_total,flow_above_20ms,collision\n";
  for (const SweepRow& row : rows) {
    os << FormatDouble(row.value) << ',' << StrategyName(row.strategy) << ','
       << Optional(row.cell.latency_to_fill_100) << ','
       << FormatDouble(row.cell.mean_flow) << ','
       << FormatDouble(row.cell.mean_velocity) << ','
       << FormatDouble(row.cell.mean_abs_accel) << ','
       << row.cell.merged_total << ','
       << FormatDouble(row.cell.flow_above_20ms) << ','
       << (row.collision ? "yes" : "no") << '\n';
  }
  return os.str();
}

}  // namespace onramp
