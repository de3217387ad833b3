#include "onramp/config.h"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace onramp {

namespace {

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double ParseNumber(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    throw ConfigError(std::string(key),
                      "expected a number, got '" + std::string(value) + "'");
  }
  return out;
}

std::uint64_t ParseUnsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key), "expected a non-negative integer, got '" +
                                            std::string(value) + "'");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(std::string(key),
                    "expected true or false, got '" + std::string(value) + "'");
}

// Geometry keys are kept apart so the network can be rebuilt after any of them
// changes.
struct Geometry {
  double loop_length;
  double ramp_length;
  double merge_section;
  double decision_offset;
};

Geometry GeometryOf(const ScenarioConfig& config) {
  const RoadNetwork& n = config.network;
  return {n.loop_length, n.ramp_length, n.merge_section_length(),
          n.decision_offset};
}

void Assign(ScenarioConfig& config, Geometry& geometry, std::string_view key,
            std::string_view value) {
  if (key == "loop_length_m") {
    geometry.loop_length = ParseNumber(key, value);
  } else if (key == "ramp_length_m") {
    geometry.ramp_length = ParseNumber(key, value);
  } else if (key == "merge_section_m") {
    geometry.merge_section = ParseNumber(key, value);
  } else if (key == "decision_offset_m") {
    geometry.decision_offset = ParseNumber(key, value);
  } else if (key == "main_density_per_km") {
    config.main_density_per_km = ParseNumber(key, value);
  } else if (key == "ramp_rate_per_min") {
    config.ramp_rate_per_min = ParseNumber(key, value);
  } else if (key == "arrival_process") {
    auto process = ParseArrivalProcess(value);
    if (!process) {
      throw ConfigError(std::string(key),
                        "expected constant or poisson, got '" +
                            std::string(value) + "'");
    }
    config.arrival_process = *process;
  } else if (key == "strategy") {
    auto kind = ParseStrategyKind(value);
    if (!kind) {
      throw ConfigError(std::string(key),
                        "unknown strategy '" + std::string(value) +
                            "' (priority, distance, velocity, "
                            "proactive_velocity)");
    }
    config.strategy = *kind;
  } else if (key == "seed") {
    config.seed = ParseUnsigned(key, value);
  } else if (key == "dt_s") {
    config.dt = ParseNumber(key, value);
  } else if (key == "duration_s") {
    config.duration = ParseNumber(key, value);
  } else if (key == "sensor_noise_pct") {
    config.sensor_noise_pct = ParseNumber(key, value);
  } else if (key == "neighbor_limit") {
    config.horizon.limit = ParseUnsigned(key, value);
  } else if (key == "neighbor_range_m") {
    config.horizon.range = ParseNumber(key, value);
  } else if (key == "sliding_decision") {
    config.sliding_decision = ParseBool(key, value);
  } else if (key == "vehicle_length_m") {
    config.vehicle_length = ParseNumber(key, value);
  } else if (key == "entry_velocity_kmh") {
    config.entry_velocity_kmh = ParseNumber(key, value);
  } else {
    throw ConfigError(std::string(key), "unknown key");
  }
}

// Maps a validation message back to the key it names.
std::string KeyInMessage(const std::string& message) {
  for (std::string_view key : ConfigKeys()) {
    if (message.find(key) != std::string::npos) return std::string(key);
  }
  return {};
}

void Finish(ScenarioConfig& config, const Geometry& geometry) {
  try {
    config.network = RoadNetwork::Make(
        geometry.loop_length, geometry.ramp_length, geometry.merge_section,
        geometry.decision_offset, config.network.merge_start);
    config.Validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(KeyInMessage(e.what()), e.what());
  }
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::invalid_argument(key.empty() ? message : key + ": " + message),
      key_(std::move(key)) {}

const std::vector<std::string_view>& ConfigKeys() {
  static const std::vector<std::string_view> keys = {
      "loop_length_m",     "ramp_length_m",       "merge_section_m",
      "decision_offset_m", "main_density_per_km", "ramp_rate_per_min",
      "arrival_process",   "strategy",            "seed",
      "dt_s",              "duration_s",          "sensor_noise_pct",
      "neighbor_limit",    "neighbor_range_m",    "sliding_decision",
      "vehicle_length_m",  "entry_velocity_kmh"};
  return keys;
}

ScenarioConfig ParseConfig(std::string_view text) {
  ScenarioConfig config;
  Geometry geometry = GeometryOf(config);
  std::set<std::string, std::less<>> seen;
  int line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{}
                                             : text.substr(newline + 1);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_number) +
                                ": expected 'key = value'");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (!seen.emplace(key).second) {
      throw ConfigError(std::string(key), "duplicate key");
    }
    Assign(config, geometry, key, value);
  }
  Finish(config, geometry);
  return config;
}

void SetConfigValue(ScenarioConfig& config, std::string_view key,
                    std::string_view value) {
  Geometry geometry = GeometryOf(config);
  Assign(config, geometry, key, Trim(value));
  Finish(config, geometry);
}

std::string FormatDouble(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string SerializeConfig(const ScenarioConfig& config) {
  const Geometry g = GeometryOf(config);
  std::ostringstream os;
  os << "loop_length_m = " << FormatDouble(g.loop_length) << '\n'
     << "ramp_length_m = " << FormatDouble(g.ramp_length) << '\n'
     << "merge_section_m = " << FormatDouble(g.merge_section) << '\n'
     << "decision_offset_m = " << FormatDouble(g.decision_offset) << '\n'
     << "main_density_per_km = " << FormatDouble(config.main_density_per_km)
     << '\n'
     << "ramp_rate_per_min = " << FormatDouble(config.ramp_rate_per_min) << '\n'
     << "arrival_process = " << ArrivalProcessName(config.arrival_process)
     << '\n'
     << "strategy = " << StrategyName(config.strategy) << '\n'
     << "seed = " << config.seed << '\n'
     << "dt_s = " << FormatDouble(config.dt) << '\n'
     << "duration_s = " << FormatDouble(config.duration) << '\n'
     << "sensor_noise_pct = " << FormatDouble(config.sensor_noise_pct) << '\n'
     << "neighbor_limit = " << config.horizon.limit << '\n'
     << "neighbor_range_m = " << FormatDouble(config.horizon.range) << '\n'
     << "sliding_decision = " << (config.sliding_decision ? "true" : "false")
     << '\n'
     << "vehicle_length_m = " << FormatDouble(config.vehicle_length) << '\n'
     << "entry_velocity_kmh = " << FormatDouble(config.entry_velocity_kmh)
     << '\n';
  return os.str();
}

}  // namespace onramp
