#pragma once

// Batch kernels with a serial reference and an OpenMP version each. The
// parallel versions give the same results as the serial ones for any thread
// count: every work item owns its state and its random stream.

#include <cstdint>
#include <span>
#include <vector>

#include "shardsim/simengine.hpp"

namespace shardsim::kernels {

/// forest_failure_prob(n, t, n / s) for s in [s_lo, s_hi].
std::vector<double> forest_sweep_serial(std::uint64_t n, std::uint64_t t, std::uint64_t s_lo,
                                        std::uint64_t s_hi);
std::vector<double> forest_sweep_parallel(std::uint64_t n, std::uint64_t t, std::uint64_t s_lo,
                                          std::uint64_t s_hi);

struct TakeoverStats {
  std::uint64_t trials = 0;
  std::uint64_t shard0_takeovers = 0;   // trials where shard 0 held >= T adversaries
  std::uint64_t any_takeovers = 0;      // trials where some shard did
  std::uint64_t max_in_shard = 0;       // largest adversary count seen in one shard

  bool operator==(const TakeoverStats&) const = default;
};

/// Each trial places the adversaries of every colour class into a uniformly
/// random set of shards (class i holds per_class[i] of its s seats) and
/// checks every shard against T. Trial k draws from Rng::stream(seed, k).
TakeoverStats takeover_trials_serial(std::size_t s, std::size_t T,
                                     std::span<const std::uint64_t> per_class,
                                     std::uint64_t trials, std::uint64_t seed);
TakeoverStats takeover_trials_parallel(std::size_t s, std::size_t T,
                                       std::span<const std::uint64_t> per_class,
                                       std::uint64_t trials, std::uint64_t seed);

/// Independent simulator runs, results in input order.
std::vector<sim::RunSummary> sweep_serial(std::span<const sim::ScenarioConfig> configs);
std::vector<sim::RunSummary> sweep_parallel(std::span<const sim::ScenarioConfig> configs);

}  // namespace shardsim::kernels
