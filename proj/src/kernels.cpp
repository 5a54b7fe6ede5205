#include "shardsim/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "shardsim/analytics.hpp"
#include "shardsim/rng.hpp"

namespace shardsim::kernels {

namespace {

void check_range(std::uint64_t n, std::uint64_t s_lo, std::uint64_t s_hi) {
  if (s_lo == 0 || s_lo > s_hi || s_hi > n) throw std::invalid_argument("shard range must satisfy 1 <= s_lo <= s_hi <= n");
}

struct Trial {
  bool shard0 = false;
  bool any = false;
  std::uint64_t max_in_shard = 0;
};

Trial one_trial(std::size_t s, std::size_t T, std::span<const std::uint64_t> per_class, Rng rng,
                std::vector<std::uint64_t>& count, std::vector<std::size_t>& seats) {
  std::fill(count.begin(), count.end(), 0);
  for (const std::uint64_t a : per_class) {
    std::iota(seats.begin(), seats.end(), std::size_t{0});
    // partial Fisher-Yates: the first a seats are a uniform a-subset
    for (std::size_t k = 0; k < a; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(rng.below(s - k));
      std::swap(seats[k], seats[pick]);
      ++count[seats[k]];
    }
  }
  Trial out;
  out.shard0 = count[0] >= T;
  for (const auto c : count) {
    out.any = out.any || c >= T;
    out.max_in_shard = std::max(out.max_in_shard, c);
  }
  return out;
}

void check_classes(std::size_t s, std::span<const std::uint64_t> per_class) {
  if (s == 0) throw std::invalid_argument("s must be positive");
  for (const auto a : per_class) {
    if (a > s) throw std::invalid_argument("a class holds at most s adversaries");
  }
}

}  // namespace

std::vector<double> forest_sweep_serial(std::uint64_t n, std::uint64_t t, std::uint64_t s_lo,
                                        std::uint64_t s_hi) {
  check_range(n, s_lo, s_hi);
  std::vector<double> out(s_hi - s_lo + 1);
  for (std::uint64_t s = s_lo; s <= s_hi; ++s) {
    out[s - s_lo] = analytics::forest_failure_prob(n, t, n / s).value();
  }
  return out;
}

std::vector<double> forest_sweep_parallel(std::uint64_t n, std::uint64_t t, std::uint64_t s_lo,
                                          std::uint64_t s_hi) {
  check_range(n, s_lo, s_hi);
  const auto count = static_cast<std::int64_t>(s_hi - s_lo + 1);
  std::vector<double> out(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t k = 0; k < count; ++k) {
    const std::uint64_t s = s_lo + static_cast<std::uint64_t>(k);
    out[static_cast<std::size_t>(k)] = analytics::forest_failure_prob(n, t, n / s).value();
  }
  return out;
}

TakeoverStats takeover_trials_serial(std::size_t s, std::size_t T,
                                     std::span<const std::uint64_t> per_class,
                                     std::uint64_t trials, std::uint64_t seed) {
  check_classes(s, per_class);
  TakeoverStats out;
  out.trials = trials;
  std::vector<std::uint64_t> count(s);
  std::vector<std::size_t> seats(s);
  for (std::uint64_t k = 0; k < trials; ++k) {
    const Trial r = one_trial(s, T, per_class, Rng::stream(seed, k), count, seats);
    out.shard0_takeovers += r.shard0;
    out.any_takeovers += r.any;
    out.max_in_shard = std::max(out.max_in_shard, r.max_in_shard);
  }
  return out;
}

TakeoverStats takeover_trials_parallel(std::size_t s, std::size_t T,
                                       std::span<const std::uint64_t> per_class,
                                       std::uint64_t trials, std::uint64_t seed) {
  check_classes(s, per_class);
  std::uint64_t shard0 = 0;
  std::uint64_t any = 0;
  std::uint64_t max_in_shard = 0;
  const auto total = static_cast<std::int64_t>(trials);
#pragma omp parallel reduction(+ : shard0, any) reduction(max : max_in_shard)
  {
    std::vector<std::uint64_t> count(s);
    std::vector<std::size_t> seats(s);
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < total; ++k) {
      const Trial r = one_trial(s, T, per_class, Rng::stream(seed, static_cast<std::uint64_t>(k)), count, seats);
      shard0 += r.shard0;
      any += r.any;
      max_in_shard = std::max(max_in_shard, r.max_in_shard);
    }
  }
  return {trials, shard0, any, max_in_shard};
}

std::vector<sim::RunSummary> sweep_serial(std::span<const sim::ScenarioConfig> configs) {
  std::vector<sim::RunSummary> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(sim::run(c).summary);
  return out;
}

std::vector<sim::RunSummary> sweep_parallel(std::span<const sim::ScenarioConfig> configs) {
  std::vector<sim::RunSummary> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const auto total = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < total; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      out[i] = sim::run(configs[i]).summary;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace shardsim::kernels
