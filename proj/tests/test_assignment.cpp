#include <gtest/gtest.h>

#include <bit>
#include <set>
#include <vector>

#include "shardsim/assignment.hpp"

using namespace shardsim;
using namespace shardsim::assignment;
using membership::MemberMatrix;
using membership::NodeRecord;

namespace {

NodeRecord node(std::uint64_t idx) {
  NodeRecord r;
  r.id = NodeId::from_index(idx);
  r.colour = ColourCode(static_cast<std::uint32_t>(idx));
  return r;
}

Hash32 text_hash(const Digest& d, std::string_view s) { return d(s); }

}  // namespace

TEST(Rid, GoldenZeroInput) {
  const Digest d;
  const Rid r = compute_rid(d, Hash32{}, NodeId{});
  EXPECT_EQ(to_hex(r.value), "98ce42deef51d40269d542f5314bef2c7468d401ad5d85168bfab4c0108f75f7");
}

TEST(Reassign, GoldenOrder) {
  const Digest d;
  std::vector<std::vector<NodeRecord>> classes(3);
  for (std::uint64_t c = 0; c < 3; ++c)
    for (std::uint64_t j = 0; j < 4; ++j) classes[c].push_back(node(c * 4 + j + 1));
  const MemberMatrix out = reassign(d, MemberMatrix(classes), text_hash(d, "golden"));
  const std::vector<std::vector<std::uint64_t>> want{{3, 2, 1, 4}, {8, 7, 6, 5}, {9, 11, 12, 10}};
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(out.classes()[c][j].id, NodeId::from_index(want[c][j]));
}

TEST(Reassign, KeepsClassMembership) {
  const Digest d;
  std::vector<std::vector<NodeRecord>> classes(5);
  for (std::uint64_t c = 0; c < 5; ++c)
    for (std::uint64_t j = 0; j < 7; ++j) classes[c].push_back(node(c * 100 + j));
  const MemberMatrix in(classes);
  const MemberMatrix out = reassign(d, in, text_hash(d, "x"));
  for (std::size_t c = 0; c < 5; ++c) {
    std::set<NodeId> a, b;
    for (const auto& r : in.classes()[c]) a.insert(r.id);
    for (const auto& r : out.classes()[c]) b.insert(r.id);
    EXPECT_EQ(a, b);
  }
  EXPECT_EQ(reassign(d, in, text_hash(d, "x")).all().front().id, out.all().front().id);
}

TEST(Reassign, PositionIsUniform) {
  // Where one fixed node lands in a class of 8 over many committee hashes.
  const Digest d;
  constexpr std::size_t s = 8;
  constexpr int trials = 8000;
  std::vector<NodeRecord> cls;
  for (std::uint64_t j = 0; j < s; ++j) cls.push_back(node(j));
  const MemberMatrix in({cls});
  std::vector<int> hits(s, 0);
  for (int t = 0; t < trials; ++t) {
    ByteWriter w;
    w.u64(static_cast<std::uint64_t>(t));
    const MemberMatrix out = reassign(d, in, d(w.view()));
    for (std::size_t j = 0; j < s; ++j) {
      if (out.classes()[0][j].id == NodeId::from_index(0)) ++hits[j];
    }
  }
  double chi2 = 0.0;
  const double expect = static_cast<double>(trials) / s;
  for (int h : hits) chi2 += (h - expect) * (h - expect) / expect;
  EXPECT_LT(chi2, 24.32);  // df = 7, p = 0.001
}

TEST(Rid, Avalanche) {
  const Digest d;
  const NodeId id = NodeId::from_index(42);
  double total = 0;
  int count = 0;
  for (int t = 0; t < 256; ++t) {
    Hash32 c = d(std::string(1, static_cast<char>(t)));
    const Rid a = compute_rid(d, c, id);
    c[static_cast<std::size_t>(t) % 32] ^= static_cast<std::uint8_t>(1u << (t % 8));
    const Rid b = compute_rid(d, c, id);
    int diff = 0;
    for (std::size_t k = 0; k < 32; ++k) diff += std::popcount(static_cast<unsigned>(a.value[k] ^ b.value[k]));
    total += diff;
    ++count;
  }
  const double mean = total / count;
  EXPECT_GT(mean, 120.0);
  EXPECT_LT(mean, 136.0);
}

TEST(ReshuffleSeed, CounterDerivation) {
  const Digest d;
  const Hash32 c = text_hash(d, "golden");
  EXPECT_EQ(reshuffle_seed(d, c, 0), c);
  EXPECT_EQ(to_hex(reshuffle_seed(d, c, 1)), "ee3459a3ef198034979d3f0d1cf5c3e8991fc7a4ee70339ef18ffe75ef5cd37a");
  EXPECT_NE(reshuffle_seed(d, c, 1), reshuffle_seed(d, c, 2));
}

TEST(Digest, AlternativeNames) {
  EXPECT_NO_THROW(Digest("sha3-256"));
  EXPECT_THROW(Digest("sha512"), std::invalid_argument);
  EXPECT_THROW(Digest("no-such-digest"), std::invalid_argument);
  EXPECT_NE(Digest("sha3-256")("a"), Digest("sha256")("a"));
}
