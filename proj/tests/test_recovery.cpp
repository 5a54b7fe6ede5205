#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "shardsim/analytics.hpp"
#include "shardsim/recovery.hpp"

using namespace shardsim;
using namespace shardsim::recovery;
using membership::MemberMatrix;
using membership::NodeRecord;
using membership::PendingSection;

namespace {

NodeRecord node(std::uint64_t idx, bool adversary = false) {
  NodeRecord r;
  r.id = NodeId::from_index(idx);
  r.colour = ColourCode(static_cast<std::uint32_t>(idx));
  r.is_adversary = adversary;
  return r;
}

// m classes of s nodes; node ids are consecutive in colour order.
MemberMatrix grid(std::size_t m, std::size_t s, const std::set<std::uint64_t>& adversaries = {}) {
  std::vector<std::vector<NodeRecord>> classes(m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t j = 0; j < s; ++j) {
      const std::uint64_t idx = c * s + j;
      classes[c].push_back(node(idx, adversaries.count(idx) > 0));
    }
  return MemberMatrix(classes);
}

std::vector<consensus::ShardStatus> statuses(std::size_t s, std::size_t halted, std::uint32_t R) {
  std::vector<consensus::ShardStatus> out(s);
  for (std::size_t j = 0; j < halted; ++j)
    for (std::uint32_t r = 0; r < R; ++r) out[j].record_abandoned(R);
  return out;
}

}  // namespace

TEST(HaltDetection, RoundCount) {
  consensus::ShardStatus st;
  EXPECT_FALSE(shard_halted(st, 3));
  st.record_abandoned(3);
  st.record_abandoned(3);
  EXPECT_FALSE(shard_halted(st, 3));
  EXPECT_EQ(st.state, consensus::ShardState::Stalled);
  st.record_abandoned(3);
  EXPECT_TRUE(shard_halted(st, 3));
  EXPECT_EQ(st.state, consensus::ShardState::Halted);
  st.record_finalized();
  EXPECT_FALSE(shard_halted(st, 3));
}

TEST(ShardHalt, Guards) {
  const Digest d;
  SystemView v{grid(3, 4), statuses(4, 0, 3), d("c"), 0};
  EXPECT_EQ(on_shard_halt(d, v, 3).action, HaltAction::None);
  v.statuses = statuses(4, 4, 3);
  EXPECT_EQ(on_shard_halt(d, v, 3).action, HaltAction::DeferToGlobal);
}

TEST(ShardHalt, ReshufflesEveryClass) {
  const Digest d;
  const Hash32 c = d("c");
  SystemView v{grid(3, 4), statuses(4, 1, 3), c, 0};
  const auto r = on_shard_halt(d, v, 3);
  ASSERT_EQ(r.action, HaltAction::Reassigned);
  EXPECT_EQ(r.system.assignment.shard_count(), 4u);
  EXPECT_EQ(r.system.reshuffles, 1u);
  for (const auto& st : r.system.statuses) EXPECT_EQ(st.failed_rounds, 0u);
  const auto expected = assignment::reassign(d, v.assignment, assignment::reshuffle_seed(d, c, 1));
  EXPECT_EQ(r.system.assignment.all().front().id, expected.all().front().id);
  // A second halt under the same committee block draws a fresh seed.
  SystemView again = r.system;
  again.statuses = statuses(4, 1, 3);
  const auto r2 = on_shard_halt(d, again, 3);
  EXPECT_EQ(r2.system.reshuffles, 2u);
}

TEST(ShardHalt, RepeatHaltFrequencyMatchesModel) {
  // m = 5, T = 4: two withheld votes stall a shard. The adversary holds 3
  // seats in each of the first two classes of 5 shards. After a reshuffle a
  // shard holds both withholders with probability (3/5)^2.
  const Digest d;
  const std::size_t m = 5, s = 5, T = 4;
  const std::set<std::uint64_t> adv{0, 1, 2, 5, 6, 7};
  const MemberMatrix start = grid(m, s, adv);
  const double model = analytics::jury_failure_prob(6, m - T + 1, s).value();
  EXPECT_DOUBLE_EQ(model, 0.36);
  const int trials = 4000;
  int stalled = 0;
  for (int t = 0; t < trials; ++t) {
    ByteWriter w;
    w.u64(static_cast<std::uint64_t>(t));
    SystemView v{start, statuses(s, 1, 3), d(w.view()), 0};
    const auto r = on_shard_halt(d, v, 3);
    std::size_t in_shard0 = 0;
    for (const auto& rec : r.system.assignment.shard(0)) in_shard0 += rec.is_adversary;
    stalled += in_shard0 >= m - T + 1;
  }
  const double freq = static_cast<double>(stalled) / trials;
  const double sigma = std::sqrt(model * (1 - model) / trials);
  EXPECT_NEAR(freq, model, 4 * sigma);
}

TEST(GlobalHalt, FallsToOneShardWhenNothingFits) {
  const Digest d;
  const MemberMatrix mm = grid(5, 2);  // 10 nodes, epsilon policy needs m >= 20
  const auto r = on_global_halt(d, mm.all(), {}, 2, ThresholdPolicy{}, d("seed"));
  EXPECT_EQ(r.shards, 1u);
  EXPECT_EQ(r.threshold, 6u);
  EXPECT_EQ(r.assignment.size(), 10u);
}

TEST(GlobalHalt, TableEightLayout) {
  const Digest d;
  // 25 nodes; 10 adversaries fill the two lowest classes.
  std::set<std::uint64_t> adv;
  for (std::uint64_t k = 0; k < 10; ++k) adv.insert(k);
  const MemberMatrix mm = grid(5, 5, adv);
  const auto r = on_global_halt(d, mm.all(), {}, 5, ThresholdPolicy{}, d("seed"));
  EXPECT_EQ(r.shards, 1u);
  EXPECT_EQ(r.threshold, 13u);
  EXPECT_GT(analytics::min_halt_fraction(25, r.shards, r.threshold), 0.4);
}

TEST(GlobalHalt, RatioPolicyKeepsLargestSmallerCount) {
  const Digest d;
  ThresholdPolicy p;
  p.kind = ThresholdPolicy::Kind::Ratio;
  const MemberMatrix mm = grid(6, 4);  // 24 nodes in 4 shards
  const auto r = on_global_halt(d, mm.all(), {}, 4, p, d("seed"));
  EXPECT_EQ(r.shards, 3u);
  EXPECT_EQ(r.assignment.class_count(), 8u);
  EXPECT_EQ(r.threshold, 6u);
  // Pending nodes join the regroup.
  PendingSection pending({node(100), node(101), node(102)});
  const auto r2 = on_global_halt(d, mm.all(), pending, 4, p, d("seed"));
  EXPECT_EQ(r2.shards, 3u);
  EXPECT_EQ(r2.assignment.size(), 27u);
}

TEST(GlobalHalt, EscalationDecreasesAndStaysSecure) {
  const Digest d;
  const ThresholdPolicy eps;
  for (std::size_t s = 2; s <= 12; ++s) {
    const std::size_t n = 40 * s;
    std::vector<NodeRecord> members;
    for (std::uint64_t k = 0; k < n; ++k) members.push_back(node(k));
    const auto r = on_global_halt(d, members, {}, s, eps, d("seed"));
    EXPECT_LT(r.shards, s);
    if (r.shards > 1) {
      const std::uint64_t seated = r.assignment.size();
      EXPECT_LE(analytics::jury_failure_prob(seated / 2 - 1, r.threshold, r.shards).value(), 1e-6);
    }
  }
}
