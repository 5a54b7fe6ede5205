#pragma once

// Halting detection and the escalation ladder: a halted shard triggers a
// global reshuffle at the same shard count; a fully halted system regroups
// into fewer, larger shards, down to a single shard of every node.

#include <cstdint>
#include <span>
#include <vector>

#include "shardsim/assignment.hpp"
#include "shardsim/consensus.hpp"
#include "shardsim/membership.hpp"
#include "shardsim/policy.hpp"

namespace shardsim::recovery {

inline bool shard_halted(const consensus::ShardStatus& status, std::uint32_t halt_rounds) {
  return status.failed_rounds >= halt_rounds;
}

/// The slice of system state recovery reads and rewrites.
struct SystemView {
  membership::MemberMatrix assignment;
  std::vector<consensus::ShardStatus> statuses;
  Hash32 c_hash{};          // latest committee block hash
  std::uint64_t reshuffles = 0;  // reshuffles already drawn from c_hash
};

enum class HaltAction { None, Reassigned, DeferToGlobal };

struct ShardHaltResult {
  SystemView system;
  HaltAction action = HaltAction::None;
};

/// With some but not all shards halted: reshuffle every class from the next
/// seed derived from c_hash, keep the shard count, reset all round counters.
ShardHaltResult on_shard_halt(const Digest& digest, SystemView system, std::uint32_t halt_rounds);

struct Regroup {
  std::size_t shards = 0;
  std::uint64_t threshold = 0;
  membership::SelectionScheme scheme;
  membership::MemberMatrix assignment;  // scheme groups after reassignment
};

/// Largest ss < s for which find_best_scheme succeeds with a feasible
/// threshold; otherwise one shard holding every member and pending node.
/// The chosen grouping is reassigned with `seed`.
Regroup on_global_halt(const Digest& digest, std::span<const membership::NodeRecord> members,
                       const membership::PendingSection& pending, std::size_t s,
                       const ThresholdPolicy& policy, const Hash32& seed);

}  // namespace shardsim::recovery
