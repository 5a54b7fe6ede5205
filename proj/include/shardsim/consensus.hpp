#pragma once

// Per-shard block lifecycle: leader choice, T-of-m tallies with PoW tickets,
// hash carry-forward for shards that miss a height, detect-then-verify
// acceptance across shards, and the event log.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shardsim/digest.hpp"
#include "shardsim/types.hpp"

namespace shardsim::consensus {

struct ShardBlockHeader {
  std::uint32_t shard_id = 0;
  std::uint64_t height = 0;
  Hash32 hash{};
  Hash32 prev_hash{};
  std::uint64_t tx_count = 0;
  std::uint64_t pending_tx_count = 0;
  std::vector<NodeId> offline_ids;
  std::uint32_t approval_count = 0;
  NodeId proposer;
  std::uint32_t round = 0;
  bool valid_content = true;  // false for an adversarial (tampered) proposal

  /// Canonical bytes of every field except `hash` and `approval_count`.
  std::string serialize() const;
  void seal(const Digest& digest) { hash = digest(serialize()); }
};

/// Modelled signature: who signed which block, plus a validity bit.
struct Signature {
  NodeId signer;
  Hash32 block_hash{};
  bool valid = true;
};

struct PowTicket {
  bool valid = false;
  std::uint32_t difficulty = 1;
};

struct Vote {
  NodeId voter;
  Hash32 block_hash{};
  bool approve = false;
  std::optional<Signature> signature;  // present iff approve
  PowTicket pow;
};

enum class ShardState { Active, Stalled, Halted };

struct ShardStatus {
  ShardState state = ShardState::Active;
  std::uint32_t failed_rounds = 0;

  void record_finalized() { *this = {}; }
  /// Stalled, or Halted once failed_rounds reaches `halt_rounds`.
  void record_abandoned(std::uint32_t halt_rounds);
};

/// How indices outside [0, s) are mapped when gathering neighbour hashes.
enum class LeaderIndexRule {
  Wrap,     // modulo s
  Reflect,  // literal |s - j| over 1-based shard ids; throws if still out of range
};

/// digest(hashes[i-5] || ... || hashes[i+5] [|| round]) reduced mod m.
/// The round suffix (u64, big-endian) is appended only for round > 0.
std::size_t select_leader(const Digest& digest, std::span<const Hash32> hashes, std::size_t i,
                          std::size_t m, std::uint64_t round = 0,
                          LeaderIndexRule rule = LeaderIndexRule::Wrap);

/// Latest block hash per (shard, height); heights without a finalized block
/// inherit the previous height's hash, down to the shard's genesis hash.
class HashLedger {
 public:
  HashLedger(const Digest& digest, std::string genesis_seed, std::size_t shards);

  std::size_t shard_count() const { return chains_.size(); }
  /// Grows or shrinks the shard set; new shards start at their genesis hash.
  void resize(std::size_t shards);

  Hash32 genesis(std::size_t shard) const;
  void finalize(std::size_t shard, std::uint64_t height, const Hash32& hash);
  /// Hash of shard at `height` when it produced no block there: the hash at
  /// height - 1 (genesis at height 0).
  Hash32 carry_forward(std::size_t shard, std::uint64_t height) const;
  Hash32 at(std::size_t shard, std::uint64_t height) const;
  std::vector<Hash32> row(std::uint64_t height) const;

 private:
  Digest digest_;
  std::string genesis_seed_;
  std::vector<std::map<std::uint64_t, Hash32>> chains_;
};

enum class Outcome { Finalized, Abandoned };

struct TallyResult {
  Outcome outcome = Outcome::Abandoned;
  std::uint32_t approvals = 0;
  std::vector<Signature> signatures;  // the counted approvals
  std::vector<NodeId> offline_ids;    // members without a valid PoW ticket, member order
};

class VoteError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finalized iff at least T members send a valid signature on `block_hash`
/// together with a valid PoW ticket. Throws VoteError for non-member or
/// duplicate voters.
TallyResult tally(std::span<const Vote> votes, const Hash32& block_hash, std::uint32_t T,
                  std::span<const NodeId> members);

enum class SyncVerdict { Pending, Accepted, Rejected };

/// Accepted iff at least T distinct member signatures on the header are valid.
/// Throws VoteError on duplicate signers or signers outside member_set.
SyncVerdict verify_bundle(const ShardBlockHeader& header, std::span<const Signature> signatures,
                          std::span<const NodeId> member_set, std::uint32_t T);

/// Detect-then-verify acceptance of announced shard headers.
class GlobalSync {
 public:
  explicit GlobalSync(std::uint64_t conflict_window) : window_(conflict_window) {}

  void announce(const ShardBlockHeader& header, Iteration now);
  /// Raises a conflict on an announced header. Returns false if unknown.
  bool report_conflict(const NodeId& reporter, const Hash32& header_hash);
  /// Settles a conflicted header with its signature bundle. A successful
  /// verification labels every reporter offline.
  SyncVerdict submit_bundle(const Hash32& header_hash, std::span<const Signature> signatures,
                            std::span<const NodeId> member_set, std::uint32_t T);

  struct Resolution {
    ShardBlockHeader header;
    SyncVerdict verdict = SyncVerdict::Pending;
  };
  /// Headers decided by `now`: bundles settled, or no conflict once the window
  /// has elapsed. Decided headers leave the queue, in announcement order.
  std::vector<Resolution> resolve(Iteration now);

  /// Reporters refuted since the last call.
  std::vector<NodeId> take_refuted_reporters();

 private:
  struct Entry {
    ShardBlockHeader header;
    Iteration announced_at = 0;
    std::vector<NodeId> reporters;
    SyncVerdict verdict = SyncVerdict::Pending;
  };
  Entry* find(const Hash32& h);

  std::uint64_t window_;
  std::vector<Entry> entries_;
  std::vector<NodeId> refuted_;
};

/// One line per event: iteration,shard_id,event_kind,payload_digest,payload.
/// System-wide events use shard_id -1.
class EventLog {
 public:
  explicit EventLog(Digest digest) : digest_(std::move(digest)) {}

  void record(Iteration it, std::int64_t shard, std::string kind, std::string payload);
  void write(std::ostream& os) const;
  std::size_t size() const { return lines_.size(); }
  std::size_t count(std::string_view kind) const;
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  Digest digest_;
  std::vector<std::string> lines_;
  std::vector<std::string> kinds_;
};

}  // namespace shardsim::consensus
