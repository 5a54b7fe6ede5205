#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include "shardsim/analytics.hpp"
#include "shardsim/consensus.hpp"
#include "shardsim/policy.hpp"

namespace shardsim::sim {

enum class StrategyKind { Random, ConcentrateClasses, HaltMaximal, ControlMaximal };

struct AdversaryStrategy {
  StrategyKind kind = StrategyKind::Random;
  std::size_t classes = 0;  // ConcentrateClasses only
};

std::string to_string(StrategyKind kind);
StrategyKind parse_strategy(const std::string& text);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::uint64_t n = 100;
  double adversary_fraction = 0.0;
  std::optional<std::uint64_t> adversary_count;  // overrides the fraction
  AdversaryStrategy strategy;
  bool adversary_reports_conflicts = false;

  std::uint64_t K = 2000;
  ThresholdPolicy threshold;
  std::optional<std::uint64_t> initial_threshold;  // forced T at bootstrap

  std::uint64_t seed = 1;
  std::uint64_t iterations = 100;
  double churn_prob = 0.0;
  analytics::ByteSizes sizes;

  std::uint32_t halt_rounds = 3;     // R
  std::uint32_t global_window = 1;   // W
  std::uint64_t conflict_window = 0;

  std::uint64_t tx_arrival_rate = 0;  // transactions per iteration, whole system
  std::uint64_t initial_shards = 1;
  std::uint64_t max_shards = 0;  // 0: bounded only by threshold feasibility
  bool scaling = true;
  bool recovery = true;
  bool stop_on_global_halt = false;

  std::string digest = "sha256";
  std::string genesis_seed = "shardsim-genesis";
  consensus::LeaderIndexRule leader_rule = consensus::LeaderIndexRule::Wrap;

  std::uint64_t adversary_total() const;
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Parses `key = value` lines with dotted section prefixes. `#` starts a
/// comment. Unknown keys and malformed values raise ConfigError with the line
/// number.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);

/// Inverse of parse_config for every key.
std::string format_config(const ScenarioConfig& cfg);

}  // namespace shardsim::sim
