#include "shardsim/consensus.hpp"

#include <algorithm>
#include <set>

namespace shardsim::consensus {

std::string ShardBlockHeader::serialize() const {
  ByteWriter w;
  w.u32(shard_id);
  w.u64(height);
  w.bytes(prev_hash);
  w.u64(tx_count);
  w.u64(pending_tx_count);
  w.u32(static_cast<std::uint32_t>(offline_ids.size()));
  for (const auto& id : offline_ids) w.bytes(id.bytes());
  w.bytes(proposer.bytes());
  w.u32(round);
  w.u8(valid_content ? 1 : 0);
  return w.data();
}

void ShardStatus::record_abandoned(std::uint32_t halt_rounds) {
  ++failed_rounds;
  state = failed_rounds >= halt_rounds ? ShardState::Halted : ShardState::Stalled;
}

namespace {

std::size_t neighbour_index(std::int64_t j, std::size_t s, LeaderIndexRule rule) {
  const auto ns = static_cast<std::int64_t>(s);
  if (rule == LeaderIndexRule::Wrap) return static_cast<std::size_t>(((j % ns) + ns) % ns);
  // 1-based ids 1..s; j is shard (i+1)+offset.
  std::int64_t id = j + 1;
  if (id < 1 || id > ns) id = ns - id < 0 ? id - ns : ns - id;
  if (id < 1 || id > ns) throw std::out_of_range("reflected shard index outside [1, s]");
  return static_cast<std::size_t>(id - 1);
}

}  // namespace

std::size_t select_leader(const Digest& digest, std::span<const Hash32> hashes, std::size_t i,
                          std::size_t m, std::uint64_t round, LeaderIndexRule rule) {
  const std::size_t s = hashes.size();
  if (s == 0) throw std::invalid_argument("no shard hashes");
  if (i >= s) throw std::out_of_range("shard index");
  if (m == 0) throw std::invalid_argument("shard size must be positive");
  ByteWriter w;
  for (std::int64_t off = -5; off <= 5; ++off) {
    w.bytes(hashes[neighbour_index(static_cast<std::int64_t>(i) + off, s, rule)]);
  }
  if (round > 0) w.u64(round);
  const Hash32 h = digest(w.view());
  // big-endian 256-bit value mod m
  unsigned __int128 r = 0;
  for (auto b : h) r = (r * 256 + b) % m;
  return static_cast<std::size_t>(r);
}

HashLedger::HashLedger(const Digest& digest, std::string genesis_seed, std::size_t shards)
    : digest_(digest), genesis_seed_(std::move(genesis_seed)), chains_(shards) {}

void HashLedger::resize(std::size_t shards) { chains_.resize(shards); }

Hash32 HashLedger::genesis(std::size_t shard) const {
  ByteWriter w;
  w.text(genesis_seed_);
  w.u64(shard);
  return digest_(w.view());
}

void HashLedger::finalize(std::size_t shard, std::uint64_t height, const Hash32& hash) {
  chains_.at(shard)[height] = hash;
}

Hash32 HashLedger::at(std::size_t shard, std::uint64_t height) const {
  const auto& chain = chains_.at(shard);
  auto it = chain.upper_bound(height);
  if (it == chain.begin()) return genesis(shard);
  return std::prev(it)->second;
}

Hash32 HashLedger::carry_forward(std::size_t shard, std::uint64_t height) const {
  if (height == 0) return genesis(shard);
  return at(shard, height - 1);
}

std::vector<Hash32> HashLedger::row(std::uint64_t height) const {
  std::vector<Hash32> out;
  out.reserve(chains_.size());
  for (std::size_t i = 0; i < chains_.size(); ++i) out.push_back(at(i, height));
  return out;
}

TallyResult tally(std::span<const Vote> votes, const Hash32& block_hash, std::uint32_t T,
                  std::span<const NodeId> members) {
  if (T == 0) throw std::invalid_argument("threshold must be positive");
  const std::set<NodeId> member_set(members.begin(), members.end());
  std::set<NodeId> seen;
  std::set<NodeId> with_ticket;
  TallyResult result;
  for (const auto& v : votes) {
    if (!member_set.count(v.voter)) throw VoteError("vote from non-member " + v.voter.hex());
    if (!seen.insert(v.voter).second) throw VoteError("duplicate vote from " + v.voter.hex());
    if (v.pow.valid) with_ticket.insert(v.voter);
    const bool counted = v.approve && v.pow.valid && v.signature && v.signature->valid &&
                         v.signature->signer == v.voter && v.signature->block_hash == block_hash &&
                         v.block_hash == block_hash;
    if (counted) result.signatures.push_back(*v.signature);
  }
  // Canonical order keeps the result independent of vote arrival order.
  std::sort(result.signatures.begin(), result.signatures.end(),
            [](const Signature& a, const Signature& b) { return a.signer < b.signer; });
  result.approvals = static_cast<std::uint32_t>(result.signatures.size());
  result.outcome = result.approvals >= T ? Outcome::Finalized : Outcome::Abandoned;
  for (const auto& id : members) {
    if (!with_ticket.count(id)) result.offline_ids.push_back(id);
  }
  return result;
}

SyncVerdict verify_bundle(const ShardBlockHeader& header, std::span<const Signature> signatures,
                          std::span<const NodeId> member_set, std::uint32_t T) {
  const std::set<NodeId> members(member_set.begin(), member_set.end());
  std::set<NodeId> signers;
  std::uint32_t good = 0;
  for (const auto& sig : signatures) {
    if (!members.count(sig.signer)) throw VoteError("bundle signer outside the shard");
    if (!signers.insert(sig.signer).second) throw VoteError("bundle repeats a signer");
    if (sig.valid && sig.block_hash == header.hash) ++good;
  }
  return good >= T ? SyncVerdict::Accepted : SyncVerdict::Rejected;
}

void GlobalSync::announce(const ShardBlockHeader& header, Iteration now) {
  entries_.push_back({header, now, {}, SyncVerdict::Pending});
}

GlobalSync::Entry* GlobalSync::find(const Hash32& h) {
  for (auto& e : entries_) {
    if (e.header.hash == h) return &e;
  }
  return nullptr;
}

bool GlobalSync::report_conflict(const NodeId& reporter, const Hash32& header_hash) {
  Entry* e = find(header_hash);
  if (e == nullptr) return false;
  if (std::find(e->reporters.begin(), e->reporters.end(), reporter) == e->reporters.end()) {
    e->reporters.push_back(reporter);
  }
  return true;
}

SyncVerdict GlobalSync::submit_bundle(const Hash32& header_hash,
                                      std::span<const Signature> signatures,
                                      std::span<const NodeId> member_set, std::uint32_t T) {
  Entry* e = find(header_hash);
  if (e == nullptr) return SyncVerdict::Rejected;
  e->verdict = verify_bundle(e->header, signatures, member_set, T);
  if (e->verdict == SyncVerdict::Accepted) {
    refuted_.insert(refuted_.end(), e->reporters.begin(), e->reporters.end());
  }
  return e->verdict;
}

std::vector<GlobalSync::Resolution> GlobalSync::resolve(Iteration now) {
  std::vector<Resolution> done;
  std::vector<Entry> keep;
  for (auto& e : entries_) {
    SyncVerdict v = e.verdict;
    if (v == SyncVerdict::Pending && e.reporters.empty() && now >= e.announced_at + window_) {
      v = SyncVerdict::Accepted;
    }
    if (v == SyncVerdict::Pending) {
      keep.push_back(std::move(e));
    } else {
      done.push_back({std::move(e.header), v});
    }
  }
  entries_ = std::move(keep);
  return done;
}

std::vector<NodeId> GlobalSync::take_refuted_reporters() {
  std::vector<NodeId> out;
  out.swap(refuted_);
  return out;
}

void EventLog::record(Iteration it, std::int64_t shard, std::string kind, std::string payload) {
  std::string line = std::to_string(it) + "," + std::to_string(shard) + "," + kind + "," +
                     to_hex(digest_(payload)) + "," + payload;
  lines_.push_back(std::move(line));
  kinds_.push_back(std::move(kind));
}

void EventLog::write(std::ostream& os) const {
  for (const auto& l : lines_) os << l << '\n';
}

std::size_t EventLog::count(std::string_view kind) const {
  return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), kind));
}

}  // namespace shardsim::consensus
