#pragma once

#include <compare>

#include "shardsim/digest.hpp"
#include "shardsim/membership.hpp"
#include "shardsim/types.hpp"

namespace shardsim::assignment {

/// 256-bit ranking value, compared as a big-endian unsigned integer.
struct Rid {
  Hash32 value{};
  auto operator<=>(const Rid&) const = default;
};

/// digest(c_hash || id).
Rid compute_rid(const Digest& digest, const Hash32& c_hash, const NodeId& id);

/// Sorts every colour class by ascending RID (ties by id bytes); rank j lands
/// in shard j, shard 0 being the committee. Class membership is unchanged.
membership::MemberMatrix reassign(const Digest& digest, const membership::MemberMatrix& matrix,
                                  const Hash32& c_hash);

/// Seed for the k-th reshuffle under one committee block: c_hash itself for
/// k = 0, digest(c_hash || k) afterwards.
Hash32 reshuffle_seed(const Digest& digest, const Hash32& c_hash, std::uint64_t k);

}  // namespace shardsim::assignment
