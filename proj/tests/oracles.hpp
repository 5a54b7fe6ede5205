#pragma once

// Brute-force references shared by the unit tests and the acceptance run.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "shardsim/membership.hpp"

namespace oracle {

using shardsim::NodeId;
using shardsim::membership::ClassCountFilter;
using shardsim::membership::NodeRecord;

// Walks every m-subset of {0..n-1} as a bitmask (Gosper's hack). Node k is
// adversarial when k < t, so a committee holds a majority of adversaries for
// every t above the position of its maj-th smallest element.
struct ForestCounts {
  std::vector<std::uint64_t> failing;  // index t
  std::uint64_t total = 0;
};

inline ForestCounts enumerate_committees(unsigned n, unsigned m) {
  ForestCounts out;
  out.failing.assign(n + 2, 0);
  const unsigned maj = m / 2 + 1;
  std::uint32_t mask = (1u << m) - 1;
  const std::uint32_t limit = 1u << n;
  while (mask < limit) {
    ++out.total;
    std::uint32_t rest = mask;
    unsigned pos = 0;
    for (unsigned k = 0; k < maj; ++k) {
      pos = static_cast<unsigned>(__builtin_ctz(rest));
      rest &= rest - 1;
    }
    ++out.failing[pos + 1];
    const std::uint32_t c = mask & (~mask + 1);
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  for (unsigned t = 1; t <= n + 1; ++t) out.failing[t] += out.failing[t - 1];
  return out;
}

inline mpq_class forest(const ForestCounts& counts, unsigned t) {
  mpq_class q(counts.failing[t], counts.total);
  q.canonicalize();
  return q;
}

// Best product of A_i/s over every way to spread at most t adversaries over T
// classes of capacity s.
inline mpq_class jury(unsigned t, unsigned T, unsigned s) {
  std::vector<unsigned> a(T, 0);
  mpq_class best = 0;
  while (true) {
    unsigned sum = 0;
    for (auto x : a) sum += x;
    if (sum <= t) {
      mpq_class p = 1;
      for (auto x : a) p *= mpq_class(x, s);
      p.canonicalize();
      if (p > best) best = p;
    }
    std::size_t k = 0;
    while (k < T && a[k] == s) a[k++] = 0;
    if (k == T) break;
    ++a[k];
  }
  return best;
}

struct Selection {
  bool found = false;
  std::size_t snp = 0;
  std::vector<std::vector<NodeId>> groups;
};

// Tries every subset of the pending nodes: members are mandatory, the total
// must split into groups of st, more pending nodes beat fewer, and among equal
// counts the more senior set wins. Groups are consecutive colour runs.
inline Selection best_selection(const std::vector<NodeRecord>& members, const std::vector<NodeRecord>& pending,
                                std::size_t st, const ClassCountFilter& accept) {
  using shardsim::membership::colour_less;
  using shardsim::membership::seniority_less;
  std::vector<std::size_t> rank(pending.size());
  {
    std::vector<std::size_t> order(pending.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return seniority_less(pending[a], pending[b]); });
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  }
  Selection best;
  std::vector<std::size_t> best_key;
  for (std::uint32_t mask = 0; mask < (1u << pending.size()); ++mask) {
    const std::size_t k = static_cast<std::size_t>(__builtin_popcount(mask));
    const std::size_t total = members.size() + k;
    if (total == 0 || total % st != 0) continue;
    if (accept && !accept(total / st)) continue;
    std::vector<std::size_t> key;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (mask >> i & 1) key.push_back(rank[i]);
    }
    std::sort(key.begin(), key.end());
    if (best.found && (k < best.snp || (k == best.snp && key >= best_key))) continue;
    std::vector<NodeRecord> chosen = members;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (mask >> i & 1) chosen.push_back(pending[i]);
    }
    std::sort(chosen.begin(), chosen.end(), colour_less);
    best.found = true;
    best.snp = k;
    best_key = key;
    best.groups.clear();
    for (std::size_t g = 0; g < total / st; ++g) {
      std::vector<NodeId> grp;
      for (std::size_t j = 0; j < st; ++j) grp.push_back(chosen[g * st + j].id);
      best.groups.push_back(grp);
    }
  }
  return best;
}

// Runs `instances` random selection problems with at most 12 candidates and
// returns how many disagree with find_best_scheme.
inline int selection_mismatches(int instances, std::uint64_t seed) {
  using namespace shardsim;
  using namespace shardsim::membership;
  std::mt19937_64 gen(seed);
  int mismatches = 0;
  for (int inst = 0; inst < instances; ++inst) {
    const std::size_t total = 1 + gen() % 12;
    const std::size_t n_members = gen() % (total + 1);
    std::vector<NodeRecord> members, pending_recs;
    for (std::size_t i = 0; i < total; ++i) {
      NodeRecord r;
      r.id = NodeId::from_index(i + 1);
      r.colour = ColourCode(static_cast<std::uint32_t>(gen() % 8));
      r.pending_since = r.reported_at = gen() % 4;
      (i < n_members ? members : pending_recs).push_back(r);
    }
    const std::size_t st = 1 + gen() % 4;
    ClassCountFilter accept;
    if (inst % 3 == 1) accept = [](std::size_t mt) { return mt >= 2; };
    if (inst % 3 == 2) accept = [](std::size_t mt) { return mt % 2 == 1; };

    const auto got = find_best_scheme(members, PendingSection(pending_recs), st, accept);
    const auto want = best_selection(members, pending_recs, st, accept);
    bool same = got.has_value() == want.found;
    if (same && got) {
      std::vector<std::vector<NodeId>> groups;
      for (const auto& g : got->scheme.groups) {
        std::vector<NodeId> ids;
        for (const auto& r : g) ids.push_back(r.id);
        groups.push_back(ids);
      }
      same = got->snp == want.snp && groups == want.groups && got->scheme.added_pending == want.snp;
    }
    if (!same) ++mismatches;
  }
  return mismatches;
}

}  // namespace oracle
