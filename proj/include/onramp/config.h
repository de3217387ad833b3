#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onramp/traffic_gen.h"

namespace onramp {

/// Config problem tied to one key (empty for syntax errors without a key).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Keys accepted by ParseConfig, in serialization order.
const std::vector<std::string_view>& ConfigKeys();

/// Parses flat `key = value` lines; '#' starts a comment. Unspecified keys keep
/// the ScenarioConfig defaults. Throws ConfigError naming the key for unknown
/// or duplicate keys, malformed values and out-of-range values.
ScenarioConfig ParseConfig(std::string_view text);

/// Inverse of ParseConfig; every key is written.
std::string SerializeConfig(const ScenarioConfig& config);

/// Applies one key = value pair to an existing config and revalidates.
void SetConfigValue(ScenarioConfig& config, std::string_view key,
                    std::string_view value);

/// Shortest decimal text that reads back to the same double.
std::string FormatDouble(double value);

}  // namespace onramp
