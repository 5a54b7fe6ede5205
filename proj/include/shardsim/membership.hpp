#pragma once

// Committee (shard 0) ledger: the pending queue, the member matrix of colour
// classes, node selection when regrouping, and workload-driven shard targets.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shardsim/digest.hpp"
#include "shardsim/types.hpp"

namespace shardsim::membership {

struct NodeRecord {
  NodeId id;
  ColourCode colour;
  bool is_adversary = false;  // simulation ground truth; protocol code never reads it
  Iteration reported_at = 0;
  Iteration pending_since = 0;
  std::uint32_t declared_difficulty = 1;
};

class DuplicateMember : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pending node section, kept in report order.
class PendingSection {
 public:
  PendingSection() = default;
  explicit PendingSection(std::vector<NodeRecord> records);

  const std::vector<NodeRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const NodeRecord* find(const NodeId& id) const;
  std::optional<NodeRecord> remove(const NodeId& id);
  void append(NodeRecord record) { records_.push_back(std::move(record)); }

 private:
  std::vector<NodeRecord> records_;
};

/// classes()[i][j] is the node of colour class i sitting in shard j.
class MemberMatrix {
 public:
  MemberMatrix() = default;
  /// Throws std::invalid_argument for ragged classes or repeated ids.
  explicit MemberMatrix(std::vector<std::vector<NodeRecord>> classes);

  const std::vector<std::vector<NodeRecord>>& classes() const { return classes_; }
  std::size_t class_count() const { return classes_.size(); }
  std::size_t shard_count() const { return classes_.empty() ? 0 : classes_.front().size(); }
  std::size_t size() const { return class_count() * shard_count(); }
  bool empty() const { return classes_.empty(); }

  /// The m members of shard j, ordered by class.
  std::vector<NodeRecord> shard(std::size_t j) const;
  bool contains(const NodeId& id) const;
  std::vector<NodeRecord> all() const;

  /// Every class lies at or above the previous one on the colour spectrum.
  bool colour_ordered() const;

 private:
  std::vector<std::vector<NodeRecord>> classes_;
};

struct CommitteeBlock {
  std::uint64_t height = 0;
  Hash32 prev_hash{};
  Hash32 c_hash{};
  std::string digest_name = "sha256";
  PendingSection pending;
  MemberMatrix members;
  std::uint32_t approvals = 0;

  /// Fixed field order, big-endian integers, u32-length-prefixed sections.
  /// Excludes c_hash itself and the simulation-only adversary flag.
  std::string serialize() const;
  /// Sets c_hash = digest(serialize()).
  void seal(const Digest& digest);
};

/// Adds a report to the pending queue. Re-reporting with a new colour moves the
/// node to the tail with pending_since = now; an identical re-report is a
/// no-op. Throws DuplicateMember if the id already sits in the member matrix.
PendingSection report_node(const PendingSection& pending, const MemberMatrix& members,
                           const NodeId& id, ColourCode colour, Iteration now,
                           bool is_adversary = false);

template <class T>
struct JuryAdmission {
  std::vector<std::vector<T>> selected;
  std::vector<std::vector<T>> remaining;
};

/// Legacy fixed-occupation admission: once every queue holds at least F
/// claimants, the front F of each queue are admitted together.
template <class T>
std::optional<JuryAdmission<T>> jury_add_trigger(const std::vector<std::vector<T>>& queues,
                                                 std::size_t F) {
  if (F == 0) throw std::invalid_argument("F must be positive");
  if (queues.empty()) return std::nullopt;
  for (const auto& q : queues) {
    if (q.size() < F) return std::nullopt;
  }
  JuryAdmission<T> out;
  for (const auto& q : queues) {
    out.selected.emplace_back(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(F));
    out.remaining.emplace_back(q.begin() + static_cast<std::ptrdiff_t>(F), q.end());
  }
  return out;
}

/// current_s plus shards above 2K pending minus shards below K/2, clamped to
/// [1, s_max].
std::uint64_t target_shard_count(std::uint64_t current_s,
                                 std::span<const std::uint64_t> per_shard_pending_tx,
                                 std::uint64_t K, std::uint64_t s_max);

/// One row of the colour-ranked list fed to the selection.
struct Candidate {
  NodeRecord record;
  bool pending = false;  // D(x) = 1
};

struct SelectionScheme {
  /// mt classes, each holding st nodes in colour order.
  std::vector<std::vector<NodeRecord>> groups;
  std::size_t added_pending = 0;
};

/// Colour ranking used everywhere: colour code, then id bytes.
bool colour_less(const NodeRecord& a, const NodeRecord& b);
/// Seniority for admission: earlier pending_since, then lower colour, then id.
bool seniority_less(const NodeRecord& a, const NodeRecord& b);

/// Builds mt groups of exactly `group_size` consecutive selected nodes from a
/// colour-sorted candidate list, selecting every member and exactly
/// `pending_budget` pending nodes (the most senior ones). nullopt if infeasible.
std::optional<SelectionScheme> dp_partition(std::span<const Candidate> candidates,
                                            std::size_t group_size, std::size_t pending_budget);

/// Accepts or rejects a prospective class count mt (e.g. threshold feasibility).
using ClassCountFilter = std::function<bool(std::size_t mt)>;

struct BestScheme {
  std::size_t snp = 0;
  SelectionScheme scheme;
};

/// Scans snp downward from min(|pending|, largest value with (n + snp) divisible
/// by st) and returns the first feasible partition.
std::optional<BestScheme> find_best_scheme(std::span<const NodeRecord> members,
                                           const PendingSection& pending, std::size_t st,
                                           const ClassCountFilter& accept = {});

/// Candidate list for the selection: members (D=0) and pending (D=1), sorted
/// by colour_less.
std::vector<Candidate> rank_candidates(std::span<const NodeRecord> members,
                                       const PendingSection& pending);

}  // namespace shardsim::membership
