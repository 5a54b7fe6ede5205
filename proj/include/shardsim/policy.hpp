#pragma once

#include <cstdint>
#include <optional>

#include "shardsim/analytics.hpp"

namespace shardsim {

/// How a shard of m members out of s shards picks its approval threshold T.
/// A single shard always runs on simple majority.
struct ThresholdPolicy {
  enum class Kind {
    Epsilon,  // select_threshold(m, epsilon)
    Ratio,    // round(ratio * m), kept inside (m/2, m]
  };

  Kind kind = Kind::Epsilon;
  double epsilon = 1e-6;
  double ratio = 0.7;

  std::optional<std::uint64_t> threshold(std::uint64_t m, std::uint64_t s) const {
    if (s == 1) return m / 2 + 1;
    if (kind == Kind::Ratio) return analytics::ratio_threshold(m, ratio);
    return analytics::select_threshold(m, analytics::Probability(epsilon));
  }

  bool feasible(std::uint64_t m, std::uint64_t s) const { return m > 0 && threshold(m, s).has_value(); }

  /// Largest s <= population whose shard size n/s has a threshold.
  std::uint64_t max_shards(std::uint64_t population) const {
    std::uint64_t best = population > 0 ? 1 : 0;
    for (std::uint64_t s = 2; s <= population; ++s) {
      if (feasible(population / s, s)) best = s;
    }
    return best;
  }
};

}  // namespace shardsim
