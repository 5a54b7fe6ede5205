#include "shardsim/membership.hpp"

#include <algorithm>
#include <set>

namespace shardsim::membership {

PendingSection::PendingSection(std::vector<NodeRecord> records) : records_(std::move(records)) {
  std::set<NodeId> seen;
  for (const auto& r : records_) {
    if (!seen.insert(r.id).second) throw std::invalid_argument("duplicate pending id");
  }
}

const NodeRecord* PendingSection::find(const NodeId& id) const {
  auto it = std::find_if(records_.begin(), records_.end(),
                         [&](const NodeRecord& r) { return r.id == id; });
  return it == records_.end() ? nullptr : &*it;
}

std::optional<NodeRecord> PendingSection::remove(const NodeId& id) {
  auto it = std::find_if(records_.begin(), records_.end(),
                         [&](const NodeRecord& r) { return r.id == id; });
  if (it == records_.end()) return std::nullopt;
  NodeRecord r = *it;
  records_.erase(it);
  return r;
}

MemberMatrix::MemberMatrix(std::vector<std::vector<NodeRecord>> classes)
    : classes_(std::move(classes)) {
  if (classes_.empty()) return;
  const std::size_t s = classes_.front().size();
  if (s == 0) throw std::invalid_argument("member matrix classes must be non-empty");
  std::set<NodeId> seen;
  for (const auto& cls : classes_) {
    if (cls.size() != s) throw std::invalid_argument("member matrix classes differ in size");
    for (const auto& r : cls) {
      if (!seen.insert(r.id).second) throw std::invalid_argument("duplicate member id");
    }
  }
}

std::vector<NodeRecord> MemberMatrix::shard(std::size_t j) const {
  if (j >= shard_count()) throw std::out_of_range("shard index");
  std::vector<NodeRecord> out;
  out.reserve(classes_.size());
  for (const auto& cls : classes_) out.push_back(cls[j]);
  return out;
}

bool MemberMatrix::contains(const NodeId& id) const {
  for (const auto& cls : classes_) {
    for (const auto& r : cls) {
      if (r.id == id) return true;
    }
  }
  return false;
}

std::vector<NodeRecord> MemberMatrix::all() const {
  std::vector<NodeRecord> out;
  out.reserve(size());
  for (const auto& cls : classes_) out.insert(out.end(), cls.begin(), cls.end());
  return out;
}

bool MemberMatrix::colour_ordered() const {
  for (std::size_t i = 1; i < classes_.size(); ++i) {
    auto prev_max = std::max_element(classes_[i - 1].begin(), classes_[i - 1].end(), colour_less);
    auto cur_min = std::min_element(classes_[i].begin(), classes_[i].end(), colour_less);
    if (colour_less(*cur_min, *prev_max)) return false;
  }
  return true;
}

namespace {
void write_record(ByteWriter& w, const NodeRecord& r) {
  w.bytes(r.id.bytes());
  w.u32(r.colour.value());
  w.u64(r.reported_at);
  w.u64(r.pending_since);
  w.u32(r.declared_difficulty);
}
}  // namespace

std::string CommitteeBlock::serialize() const {
  ByteWriter w;
  w.u64(height);
  w.bytes(prev_hash);
  w.text(digest_name);

  ByteWriter pend;
  pend.u32(static_cast<std::uint32_t>(pending.size()));
  for (const auto& r : pending.records()) write_record(pend, r);
  w.prefixed(pend.view());

  ByteWriter mem;
  mem.u32(static_cast<std::uint32_t>(members.class_count()));
  mem.u32(static_cast<std::uint32_t>(members.shard_count()));
  for (const auto& cls : members.classes()) {
    for (const auto& r : cls) write_record(mem, r);
  }
  w.prefixed(mem.view());

  w.u32(approvals);
  return w.data();
}

void CommitteeBlock::seal(const Digest& digest) { c_hash = digest(serialize()); }

PendingSection report_node(const PendingSection& pending, const MemberMatrix& members,
                           const NodeId& id, ColourCode colour, Iteration now,
                           bool is_adversary) {
  if (members.contains(id)) throw DuplicateMember("node " + id.hex() + " is already a member");
  PendingSection out = pending;
  if (const NodeRecord* existing = out.find(id)) {
    if (existing->colour == colour) return out;
    NodeRecord moved = *out.remove(id);
    moved.colour = colour;
    moved.pending_since = now;
    out.append(moved);
    return out;
  }
  NodeRecord r;
  r.id = id;
  r.colour = colour;
  r.is_adversary = is_adversary;
  r.reported_at = now;
  r.pending_since = now;
  out.append(r);
  return out;
}

std::uint64_t target_shard_count(std::uint64_t current_s,
                                 std::span<const std::uint64_t> per_shard_pending_tx,
                                 std::uint64_t K, std::uint64_t s_max) {
  if (K == 0) throw std::invalid_argument("workload unit K must be positive");
  if (per_shard_pending_tx.size() != current_s) {
    throw std::invalid_argument("one pending count per shard required");
  }
  std::int64_t st = static_cast<std::int64_t>(current_s);
  for (auto p : per_shard_pending_tx) {
    if (p > 2 * K) ++st;
    // p < K/2, kept in integers: 2p < K
    if (2 * p < K) --st;
  }
  const auto hi = static_cast<std::int64_t>(std::max<std::uint64_t>(s_max, 1));
  return static_cast<std::uint64_t>(std::clamp<std::int64_t>(st, 1, hi));
}

bool colour_less(const NodeRecord& a, const NodeRecord& b) {
  if (a.colour != b.colour) return a.colour < b.colour;
  return a.id < b.id;
}

bool seniority_less(const NodeRecord& a, const NodeRecord& b) {
  if (a.pending_since != b.pending_since) return a.pending_since < b.pending_since;
  return colour_less(a, b);
}

std::optional<SelectionScheme> dp_partition(std::span<const Candidate> candidates,
                                            std::size_t group_size, std::size_t pending_budget) {
  if (group_size == 0) throw std::invalid_argument("group size must be positive");
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (colour_less(candidates[i].record, candidates[i - 1].record)) {
      throw std::invalid_argument("candidates must be sorted by colour");
    }
  }

  // reach[x][k]: the first x candidates admit k selected nodes with every
  // member among them selected. Groups are closed at every k that is a
  // multiple of group_size, so k / group_size counts the groups formed.
  const std::size_t members = static_cast<std::size_t>(
      std::count_if(candidates.begin(), candidates.end(), [](const Candidate& c) { return !c.pending; }));
  const std::size_t target = members + pending_budget;
  if (target == 0 || target % group_size != 0 || target > candidates.size()) return std::nullopt;

  const std::size_t n = candidates.size();
  std::vector<std::vector<char>> reach(n + 1, std::vector<char>(target + 1, 0));
  reach[0][0] = 1;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t k = 0; k <= target; ++k) {
      if (!reach[x][k]) continue;
      if (candidates[x].pending) reach[x + 1][k] = 1;
      if (k < target) reach[x + 1][k + 1] = 1;
    }
  }
  if (!reach[n][target]) return std::nullopt;

  // Any pending subset of the right size completes a path, so admission order
  // is free to follow seniority.
  std::vector<const NodeRecord*> pending;
  for (const auto& c : candidates) {
    if (c.pending) pending.push_back(&c.record);
  }
  std::sort(pending.begin(), pending.end(),
            [](const NodeRecord* a, const NodeRecord* b) { return seniority_less(*a, *b); });
  std::set<NodeId> admitted;
  for (std::size_t i = 0; i < pending_budget; ++i) admitted.insert(pending[i]->id);

  SelectionScheme scheme;
  scheme.added_pending = pending_budget;
  std::vector<NodeRecord> group;
  for (const auto& c : candidates) {
    if (c.pending && !admitted.count(c.record.id)) continue;
    group.push_back(c.record);
    if (group.size() == group_size) {
      scheme.groups.push_back(std::move(group));
      group.clear();
    }
  }
  return scheme;
}

std::vector<Candidate> rank_candidates(std::span<const NodeRecord> members,
                                       const PendingSection& pending) {
  std::vector<Candidate> out;
  out.reserve(members.size() + pending.size());
  for (const auto& r : members) out.push_back({r, false});
  for (const auto& r : pending.records()) out.push_back({r, true});
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return colour_less(a.record, b.record); });
  return out;
}

std::optional<BestScheme> find_best_scheme(std::span<const NodeRecord> members,
                                           const PendingSection& pending, std::size_t st,
                                           const ClassCountFilter& accept) {
  if (st == 0) throw std::invalid_argument("shard target must be positive");
  const auto candidates = rank_candidates(members, pending);
  const std::size_t n = members.size();
  for (std::size_t snp = pending.size() + 1; snp-- > 0;) {
    if ((n + snp) == 0 || (n + snp) % st != 0) continue;
    const std::size_t mt = (n + snp) / st;
    if (accept && !accept(mt)) continue;
    if (auto scheme = dp_partition(candidates, st, snp)) return BestScheme{snp, std::move(*scheme)};
  }
  return std::nullopt;
}

}  // namespace shardsim::membership
