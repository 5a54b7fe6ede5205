#include "shardsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace shardsim::sim {

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Random: return "random";
    case StrategyKind::ConcentrateClasses: return "concentrate";
    case StrategyKind::HaltMaximal: return "halt-maximal";
    case StrategyKind::ControlMaximal: return "control-maximal";
  }
  return "random";
}

StrategyKind parse_strategy(const std::string& text) {
  if (text == "random") return StrategyKind::Random;
  if (text == "concentrate") return StrategyKind::ConcentrateClasses;
  if (text == "halt-maximal") return StrategyKind::HaltMaximal;
  if (text == "control-maximal") return StrategyKind::ControlMaximal;
  throw ConfigError("unknown adversary strategy '" + text + "'");
}

std::uint64_t ScenarioConfig::adversary_total() const {
  if (adversary_count) return *adversary_count;
  // small slack so 0.4 * 25 lands on 10
  return static_cast<std::uint64_t>(std::floor(adversary_fraction * static_cast<double>(n) + 1e-9));
}

void ScenarioConfig::validate() const {
  if (n == 0) throw ConfigError("nodes.count must be positive");
  if (!(adversary_fraction >= 0.0 && adversary_fraction < 1.0)) {
    throw ConfigError("adversary.fraction must lie in [0, 1)");
  }
  if (adversary_count && *adversary_count > n) throw ConfigError("adversary.count exceeds nodes.count");
  if (K == 0) throw ConfigError("workload.k must be positive");
  if (!(threshold.epsilon > 0.0 && threshold.epsilon < 1.0)) {
    throw ConfigError("threshold.epsilon must lie in (0, 1)");
  }
  if (!(threshold.ratio > 0.5 && threshold.ratio <= 1.0)) {
    throw ConfigError("threshold.ratio must lie in (0.5, 1]");
  }
  if (!(churn_prob >= 0.0 && churn_prob <= 1.0)) throw ConfigError("churn.probability must lie in [0, 1]");
  if (halt_rounds == 0) throw ConfigError("timeouts.halt_rounds must be positive");
  if (global_window == 0) throw ConfigError("timeouts.global_window must be positive");
  if (initial_shards == 0 || initial_shards > n) throw ConfigError("shards.initial must lie in [1, n]");
  if (strategy.kind == StrategyKind::ConcentrateClasses && strategy.classes == 0) {
    throw ConfigError("adversary.classes must be positive for the concentrate strategy");
  }
  try {
    Digest probe(digest);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("expected an unsigned integer, got '" + v + "'");
  return out;
}

std::uint32_t to_u32(const std::string& v) {
  const auto x = to_u64(v);
  if (x > UINT32_MAX) throw ConfigError("value out of range: '" + v + "'");
  return static_cast<std::uint32_t>(x);
}

double to_double(const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"nodes.count", [](ScenarioConfig& c, const std::string& v) { c.n = to_u64(v); }},
      {"adversary.fraction", [](ScenarioConfig& c, const std::string& v) { c.adversary_fraction = to_double(v); }},
      {"adversary.count", [](ScenarioConfig& c, const std::string& v) { c.adversary_count = to_u64(v); }},
      {"adversary.strategy", [](ScenarioConfig& c, const std::string& v) { c.strategy.kind = parse_strategy(v); }},
      {"adversary.classes", [](ScenarioConfig& c, const std::string& v) { c.strategy.classes = to_u64(v); }},
      {"adversary.report_conflicts",
       [](ScenarioConfig& c, const std::string& v) { c.adversary_reports_conflicts = to_bool(v); }},
      {"workload.k", [](ScenarioConfig& c, const std::string& v) { c.K = to_u64(v); }},
      {"workload.arrival_rate", [](ScenarioConfig& c, const std::string& v) { c.tx_arrival_rate = to_u64(v); }},
      {"threshold.policy",
       [](ScenarioConfig& c, const std::string& v) {
         if (v == "epsilon") c.threshold.kind = ThresholdPolicy::Kind::Epsilon;
         else if (v == "ratio") c.threshold.kind = ThresholdPolicy::Kind::Ratio;
         else throw ConfigError("threshold.policy must be epsilon or ratio");
       }},
      {"threshold.epsilon", [](ScenarioConfig& c, const std::string& v) { c.threshold.epsilon = to_double(v); }},
      {"threshold.ratio", [](ScenarioConfig& c, const std::string& v) { c.threshold.ratio = to_double(v); }},
      {"threshold.initial", [](ScenarioConfig& c, const std::string& v) { c.initial_threshold = to_u64(v); }},
      {"seed", [](ScenarioConfig& c, const std::string& v) { c.seed = to_u64(v); }},
      {"iterations", [](ScenarioConfig& c, const std::string& v) { c.iterations = to_u64(v); }},
      {"churn.probability", [](ScenarioConfig& c, const std::string& v) { c.churn_prob = to_double(v); }},
      {"bytes.header", [](ScenarioConfig& c, const std::string& v) { c.sizes.header = to_u64(v); }},
      {"bytes.transaction", [](ScenarioConfig& c, const std::string& v) { c.sizes.transaction = to_u64(v); }},
      {"bytes.signature", [](ScenarioConfig& c, const std::string& v) { c.sizes.signature = to_u64(v); }},
      {"bytes.committee_per_node",
       [](ScenarioConfig& c, const std::string& v) { c.sizes.committee_per_node = to_u64(v); }},
      {"bytes.shard_block", [](ScenarioConfig& c, const std::string& v) { c.sizes.shard_block = to_u64(v); }},
      {"block.txs", [](ScenarioConfig& c, const std::string& v) { c.sizes.txs_per_block = to_u64(v); }},
      {"timeouts.halt_rounds", [](ScenarioConfig& c, const std::string& v) { c.halt_rounds = to_u32(v); }},
      {"timeouts.global_window", [](ScenarioConfig& c, const std::string& v) { c.global_window = to_u32(v); }},
      {"timeouts.conflict_window", [](ScenarioConfig& c, const std::string& v) { c.conflict_window = to_u64(v); }},
      {"shards.initial", [](ScenarioConfig& c, const std::string& v) { c.initial_shards = to_u64(v); }},
      {"shards.max", [](ScenarioConfig& c, const std::string& v) { c.max_shards = to_u64(v); }},
      {"scaling.enabled", [](ScenarioConfig& c, const std::string& v) { c.scaling = to_bool(v); }},
      {"recovery.enabled", [](ScenarioConfig& c, const std::string& v) { c.recovery = to_bool(v); }},
      {"recovery.stop_on_global_halt",
       [](ScenarioConfig& c, const std::string& v) { c.stop_on_global_halt = to_bool(v); }},
      {"digest", [](ScenarioConfig& c, const std::string& v) { c.digest = v; }},
      {"genesis.seed", [](ScenarioConfig& c, const std::string& v) { c.genesis_seed = v; }},
      {"leader.index_rule",
       [](ScenarioConfig& c, const std::string& v) {
         if (v == "wrap") c.leader_rule = consensus::LeaderIndexRule::Wrap;
         else if (v == "reflect") c.leader_rule = consensus::LeaderIndexRule::Reflect;
         else throw ConfigError("leader.index_rule must be wrap or reflect");
       }},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string format_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "nodes.count = " << c.n << '\n';
  os << "adversary.fraction = " << c.adversary_fraction << '\n';
  if (c.adversary_count) os << "adversary.count = " << *c.adversary_count << '\n';
  os << "adversary.strategy = " << to_string(c.strategy.kind) << '\n';
  os << "adversary.classes = " << c.strategy.classes << '\n';
  os << "adversary.report_conflicts = " << (c.adversary_reports_conflicts ? "true" : "false") << '\n';
  os << "workload.k = " << c.K << '\n';
  os << "workload.arrival_rate = " << c.tx_arrival_rate << '\n';
  os << "threshold.policy = " << (c.threshold.kind == ThresholdPolicy::Kind::Ratio ? "ratio" : "epsilon") << '\n';
  os << "threshold.epsilon = " << c.threshold.epsilon << '\n';
  os << "threshold.ratio = " << c.threshold.ratio << '\n';
  if (c.initial_threshold) os << "threshold.initial = " << *c.initial_threshold << '\n';
  os << "seed = " << c.seed << '\n';
  os << "iterations = " << c.iterations << '\n';
  os << "churn.probability = " << c.churn_prob << '\n';
  os << "bytes.header = " << c.sizes.header << '\n';
  os << "bytes.transaction = " << c.sizes.transaction << '\n';
  os << "bytes.signature = " << c.sizes.signature << '\n';
  os << "bytes.committee_per_node = " << c.sizes.committee_per_node << '\n';
  os << "bytes.shard_block = " << c.sizes.shard_block << '\n';
  os << "block.txs = " << c.sizes.txs_per_block << '\n';
  os << "timeouts.halt_rounds = " << c.halt_rounds << '\n';
  os << "timeouts.global_window = " << c.global_window << '\n';
  os << "timeouts.conflict_window = " << c.conflict_window << '\n';
  os << "shards.initial = " << c.initial_shards << '\n';
  os << "shards.max = " << c.max_shards << '\n';
  os << "scaling.enabled = " << (c.scaling ? "true" : "false") << '\n';
  os << "recovery.enabled = " << (c.recovery ? "true" : "false") << '\n';
  os << "recovery.stop_on_global_halt = " << (c.stop_on_global_halt ? "true" : "false") << '\n';
  os << "digest = " << c.digest << '\n';
  os << "genesis.seed = " << c.genesis_seed << '\n';
  os << "leader.index_rule = " << (c.leader_rule == consensus::LeaderIndexRule::Wrap ? "wrap" : "reflect") << '\n';
  return os.str();
}

}  // namespace shardsim::sim
