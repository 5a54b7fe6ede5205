#pragma once

// Closed-form security and capacity model: committee-sampling failure
// probabilities, threshold selection, halt/control fractions, throughput and
// per-node data requirement. Everything here is a pure function.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace shardsim::analytics {

class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::invalid_argument("probability must lie in [0, 1]");
    }
  }
  constexpr double value() const { return value_; }
  auto operator<=>(const Probability&) const = default;

 private:
  double value_ = 0.0;
};

/// Byte sizes feeding the per-node data requirement.
struct ByteSizes {
  std::uint64_t header = 150;
  std::uint64_t transaction = 500;
  std::uint64_t signature = 512;
  std::uint64_t committee_per_node = 33;
  std::uint64_t shard_block = 1'000'000;
  std::uint64_t txs_per_block = 2000;

  static ByteSizes zero() { return {0, 0, 0, 0, 0, 0}; }
};

struct CapacityPoint {
  std::uint64_t s = 0;
  std::uint64_t m = 0;
  std::uint64_t T = 0;
  double halt_fraction = 0.0;
  double control_fraction = 0.0;
  std::uint64_t throughput = 0;
  std::uint64_t data_requirement = 0;
};

/// Exact Pr[X >= floor(m/2)+1] for X hypergeometric: a committee of m drawn
/// without replacement from n nodes of which t are adversarial.
mpq_class forest_failure_exact(std::uint64_t n, std::uint64_t t, std::uint64_t m);
Probability forest_failure_prob(std::uint64_t n, std::uint64_t t, std::uint64_t m);

/// Largest s with forest_failure_prob(n, t, n / s) <= epsilon, or 0.
std::uint64_t max_shards_forest(std::uint64_t n, std::uint64_t t, Probability epsilon);

/// Adversary counts per colour class that maximise the product over the
/// first T classes: ceil(t/T) for the first t mod T classes, floor(t/T) for
/// the rest of the first T, zero beyond. With `cap` (class size s) set,
/// throws std::domain_error when t > T * s.
std::vector<std::uint64_t> optimal_adversary_allocation(
    std::uint64_t t, std::uint64_t T, std::uint64_t classes,
    std::optional<std::uint64_t> cap = std::nullopt);

enum class JuryMode { Exact, Approx };

/// Product of A_i / s over the optimal allocation, as an exact rational.
mpq_class jury_failure_exact(std::uint64_t t, std::uint64_t T, std::uint64_t s);

/// Exact: product of A_i / s (1 when t >= T*s). Approx: (t / (T*s))^T.
Probability jury_failure_prob(std::uint64_t t, std::uint64_t T, std::uint64_t s,
                              JuryMode mode = JuryMode::Exact);

/// round(ratio * m) pulled into the valid band (m/2, m].
std::uint64_t ratio_threshold(std::uint64_t m, double ratio);

/// Largest s for which an adversary holding `adversary_fraction` of the seated
/// population (m*s nodes, m = n/s) keeps the exact jury failure at or below
/// epsilon, with T = ratio_threshold(m, ratio). Returns 0 if none.
std::uint64_t max_shards_jury(std::uint64_t n, double adversary_fraction, double ratio,
                              Probability epsilon);

/// Smallest T > m/2 with (m / 2T)^T <= epsilon; nullopt when even T = m
/// misses the bound (2^-m > epsilon).
std::optional<std::uint64_t> select_threshold(std::uint64_t m, Probability epsilon);

/// Threshold the protocol runs with: simple majority for a single shard
/// (no sampling, so no takeover probability to bound), select_threshold
/// otherwise.
std::optional<std::uint64_t> protocol_threshold(std::uint64_t m, std::uint64_t s,
                                                Probability epsilon);

/// s * (m - T + 1) / n, m = n / s.
double min_halt_fraction(std::uint64_t n, std::uint64_t s, std::uint64_t T);

/// T / m, m = n / s.
double min_control_fraction(std::uint64_t n, std::uint64_t s, std::uint64_t T);

/// header*s + transaction*txs_per_block + signature*m + committee_per_node*n
/// + shard_block.
std::uint64_t data_requirement(const ByteSizes& sizes, std::uint64_t s, std::uint64_t m,
                               std::uint64_t n);

std::uint64_t throughput(std::uint64_t s, std::uint64_t txs_per_block);

/// One row per s in [1, n] whose protocol threshold is feasible.
std::vector<CapacityPoint> capacity_table(std::uint64_t n, Probability epsilon,
                                          const ByteSizes& sizes);

}  // namespace shardsim::analytics
