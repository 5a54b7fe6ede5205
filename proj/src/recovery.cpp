#include "shardsim/recovery.hpp"

#include <algorithm>

namespace shardsim::recovery {

ShardHaltResult on_shard_halt(const Digest& digest, SystemView system, std::uint32_t halt_rounds) {
  const auto halted = static_cast<std::size_t>(
      std::count_if(system.statuses.begin(), system.statuses.end(),
                    [&](const consensus::ShardStatus& st) { return shard_halted(st, halt_rounds); }));
  if (halted == 0) return {std::move(system), HaltAction::None};
  if (halted == system.statuses.size()) return {std::move(system), HaltAction::DeferToGlobal};

  ++system.reshuffles;
  const Hash32 seed = assignment::reshuffle_seed(digest, system.c_hash, system.reshuffles);
  system.assignment = assignment::reassign(digest, system.assignment, seed);
  for (auto& st : system.statuses) st = {};
  return {std::move(system), HaltAction::Reassigned};
}

Regroup on_global_halt(const Digest& digest, std::span<const membership::NodeRecord> members,
                       const membership::PendingSection& pending, std::size_t s,
                       const ThresholdPolicy& policy, const Hash32& seed) {
  for (std::size_t ss = s > 0 ? s - 1 : 0; ss >= 2; --ss) {
    auto best = membership::find_best_scheme(
        members, pending, ss, [&](std::size_t mt) { return policy.feasible(mt, ss); });
    if (!best) continue;
    Regroup out;
    out.shards = ss;
    out.threshold = *policy.threshold(best->scheme.groups.size(), ss);
    out.scheme = std::move(best->scheme);
    out.assignment = assignment::reassign(digest, membership::MemberMatrix(out.scheme.groups), seed);
    return out;
  }
  // Single shard: no class-size restriction, every node joins.
  auto all = membership::find_best_scheme(members, pending, 1);
  if (!all) throw std::invalid_argument("cannot regroup an empty system");
  Regroup out;
  out.shards = 1;
  out.threshold = *policy.threshold(all->scheme.groups.size(), 1);
  out.scheme = std::move(all->scheme);
  out.assignment = membership::MemberMatrix(out.scheme.groups);
  return out;
}

}  // namespace shardsim::recovery
