#pragma once

// Deterministic discrete-event simulator. One seeded generator drives every
// random choice, so (config, seed) fixes the metrics and the event log byte
// for byte.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shardsim/config.hpp"
#include "shardsim/consensus.hpp"
#include "shardsim/membership.hpp"
#include "shardsim/rng.hpp"

namespace shardsim::sim {

class InfeasibleScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricsRow {
  std::uint64_t iteration = 0;
  std::uint64_t s = 0;
  std::uint64_t m = 0;
  std::uint64_t T = 0;
  std::uint64_t finalized_tx = 0;  // this iteration
  std::uint64_t halted_shards = 0;
  std::uint64_t recoveries = 0;  // cumulative
  std::uint64_t dr_bytes_per_node = 0;
  std::uint64_t pending_nodes = 0;
  std::uint64_t pending_tx_total = 0;
  // Not part of the CSV.
  std::uint64_t population = 0;
  std::uint64_t arrived_tx_total = 0;
  std::uint64_t finalized_blocks = 0;  // this iteration
};

/// Header row, then one row per iteration; integers in decimal.
void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows);

struct RunSummary {
  std::uint64_t iterations_run = 0;
  std::uint64_t shard_halts = 0;        // shards entering Halted
  std::uint64_t reassignments = 0;      // partial-halt reshuffles
  std::uint64_t global_halts = 0;
  std::uint64_t recoveries = 0;         // shard-count reductions after a global halt
  std::uint64_t final_s = 0;
  std::uint64_t final_T = 0;
  std::uint64_t total_finalized_tx = 0;
  std::uint64_t finalized_blocks = 0;
  std::uint64_t tampered_blocks = 0;    // invalid blocks that reached T approvals
  std::uint64_t evictions = 0;
  std::optional<std::uint64_t> first_global_halt;
  std::optional<std::uint64_t> first_finalize_after_global_halt;
};

void write_summary(std::ostream& os, const RunSummary& summary);

struct RunResult {
  std::vector<MetricsRow> metrics;
  consensus::EventLog events;
  RunSummary summary;
  std::vector<consensus::ShardBlockHeader> finalized_headers;  // filled if requested
  /// Adversary members per colour class right after bootstrap.
  std::vector<std::uint64_t> bootstrap_class_adversaries;
};

/// Optional instrumentation for tests.
struct RunHooks {
  /// Returns true when the node should skip its PoW in that iteration,
  /// replacing the churn draw for honest nodes.
  std::function<bool(const membership::NodeRecord&, Iteration)> skip_pow;
  bool record_headers = false;
};

/// Runs the scenario with a generated population.
RunResult run(const ScenarioConfig& config, const RunHooks& hooks = {});

/// Runs the scenario with an explicit population (ids, colours, adversary
/// flags); nodes.count and the adversary settings for placement are ignored.
RunResult run(const ScenarioConfig& config, std::vector<membership::NodeRecord> population,
              const RunHooks& hooks = {});

/// Colours for `count` joining adversary nodes, given the honest colours
/// already reported and the grouping (s shards, m classes, threshold T) they
/// will be admitted into.
///  Random:                  uniform over the spectrum.
///  ConcentrateClasses(k):   packed at the bottom of the spectrum, filling
///                           the k lowest class ranges.
///  HaltMaximal:             ConcentrateClasses with k = m - T + 1.
///  ControlMaximal:          the optimal allocation over the first T classes,
///                           interleaved with honest colours.
std::vector<ColourCode> adversary_report_colours(const AdversaryStrategy& strategy,
                                                 std::vector<ColourCode> honest, std::size_t s,
                                                 std::size_t m, std::size_t T, std::size_t count,
                                                 Rng& rng);

/// Smallest adversary count that keeps a freshly bootstrapped (n, s) system
/// globally halted with no finalized block over the probe window. Binary
/// search over deterministic probe runs with scaling and recovery disabled.
std::uint64_t measure_halt_threshold(std::uint64_t n, std::uint64_t s, const AdversaryStrategy& strategy,
                                     std::optional<std::uint64_t> forced_T = std::nullopt,
                                     const ScenarioConfig& base = {});

}  // namespace shardsim::sim
