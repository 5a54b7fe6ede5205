#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "shardsim/analytics.hpp"

using namespace shardsim::analytics;

TEST(Forest, MatchesCommitteeEnumeration) {
  for (unsigned n = 1; n <= 24; ++n) {
    for (unsigned m = 1; m <= std::min(8u, n); ++m) {
      const auto counts = oracle::enumerate_committees(n, m);
      for (unsigned t = 0; t <= n; ++t) {
        ASSERT_EQ(forest_failure_exact(n, t, m), oracle::forest(counts, t)) << "n=" << n << " m=" << m << " t=" << t;
      }
    }
  }
}

TEST(Forest, SmallKnownValue) {
  EXPECT_EQ(forest_failure_exact(20, 10, 4), mpq_class(94, 323));
  EXPECT_EQ(forest_failure_exact(10, 0, 3), 0);
  EXPECT_EQ(forest_failure_exact(10, 10, 3), 1);
}

TEST(Forest, CapacityAtTwoThousandNodes) {
  EXPECT_EQ(max_shards_forest(2000, 666, Probability(1e-6)), 11u);
  EXPECT_EQ(max_shards_forest(100, 50, Probability(0.5)), 100u);
  EXPECT_EQ(max_shards_forest(100, 60, Probability(1e-9)), 0u);
}

TEST(Forest, FailureGrowsAsCommitteesShrink) {
  // Majority parity makes even sizes relatively safer, so compare within
  // one parity.
  for (std::uint64_t parity = 0; parity < 2; ++parity) {
    double prev = 0.0;
    for (std::uint64_t m = 400 + parity; m >= 3; m -= 2) {
      const double p = forest_failure_prob(2000, 666, m).value();
      EXPECT_GE(p, prev) << m;
      prev = p;
    }
  }
}

TEST(Forest, RejectsOversizedCommittee) { EXPECT_THROW(forest_failure_exact(5, 2, 6), std::invalid_argument); }

TEST(Jury, MatchesBruteForceAllocation) {
  for (unsigned s = 1; s <= 4; ++s) {
    for (unsigned T = 1; T <= 5; ++T) {
      for (unsigned t = 0; t <= 12; ++t) {
        ASSERT_EQ(jury_failure_exact(t, T, s), oracle::jury(t, T, s)) << "t=" << t << " T=" << T << " s=" << s;
      }
    }
  }
}

TEST(Jury, AllocationShape) {
  EXPECT_EQ(optimal_adversary_allocation(5, 3, 5), (std::vector<std::uint64_t>{2, 2, 1, 0, 0}));
  EXPECT_EQ(optimal_adversary_allocation(9, 3, 3), (std::vector<std::uint64_t>{3, 3, 3}));
  EXPECT_THROW(optimal_adversary_allocation(10, 3, 3, 3), std::domain_error);
}

TEST(Jury, ApproximationTracksExactWhenDivisible) {
  // With t a multiple of T both forms coincide.
  for (std::uint64_t T = 2; T <= 30; ++T) {
    const std::uint64_t s = 40;
    const std::uint64_t t = T * 17;
    EXPECT_NEAR(jury_failure_prob(t, T, s).value(), jury_failure_prob(t, T, s, JuryMode::Approx).value(),
                1e-12 * jury_failure_prob(t, T, s).value() + 1e-300);
  }
}

TEST(Jury, CapacityWithSeventyPercentThreshold) {
  // Half of the seated population adversarial.
  EXPECT_EQ(max_shards_jury(2000, 0.5, 0.7, Probability(1e-6)), 34u);
}

TEST(Threshold, SelectedValues) {
  const Probability eps(1e-6);
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> expected{
      {20, 20}, {40, 32}, {50, 37}, {60, 42}, {100, 63}, {150, 88}, {200, 114}, {400, 214}, {800, 414}, {1000, 514}};
  for (const auto& [m, T] : expected) EXPECT_EQ(select_threshold(m, eps), T) << m;
  EXPECT_FALSE(select_threshold(19, eps).has_value());
  EXPECT_THROW(select_threshold(0, eps), std::invalid_argument);
}

TEST(Threshold, DefinitionHoldsAndIsMinimal) {
  const double eps = 1e-6;
  for (std::uint64_t m = 20; m <= 1200; ++m) {
    const auto T = select_threshold(m, Probability(eps));
    ASSERT_TRUE(T.has_value()) << m;
    auto bound = [&](std::uint64_t x) {
      return static_cast<double>(x) * std::log(static_cast<double>(m) / (2.0 * static_cast<double>(x)));
    };
    EXPECT_LE(bound(*T), std::log(eps) + 1e-9) << m;
    EXPECT_GT(2 * *T, m);
    if (2 * (*T - 1) > m) {
      EXPECT_GT(bound(*T - 1), std::log(eps) - 1e-9) << m;
    }
  }
}

TEST(Threshold, RatioApproachesOneHalf) {
  const std::vector<std::uint64_t> ms{20, 50, 100, 200, 400, 800, 1000};
  double prev = 2.0;
  for (auto m : ms) {
    const double r = static_cast<double>(*select_threshold(m, Probability(1e-6))) / static_cast<double>(m);
    EXPECT_LE(r, prev);
    prev = r;
  }
  EXPECT_LE(prev, 0.52);
}

TEST(Threshold, ProtocolUsesMajorityForOneShard) {
  EXPECT_EQ(protocol_threshold(25, 1, Probability(1e-6)), 13u);
  EXPECT_EQ(protocol_threshold(5, 5, Probability(1e-6)), std::nullopt);
  EXPECT_EQ(protocol_threshold(50, 10, Probability(1e-6)), 37u);
}

TEST(Threshold, RatioRule) {
  EXPECT_EQ(ratio_threshold(5, 0.7), 4u);
  EXPECT_EQ(ratio_threshold(4, 0.5), 3u);
  EXPECT_EQ(ratio_threshold(10, 1.0), 10u);
}

TEST(Fractions, HaltAndControl) {
  EXPECT_DOUBLE_EQ(min_halt_fraction(25, 5, 4), 0.4);
  EXPECT_DOUBLE_EQ(min_halt_fraction(25, 1, 13), 0.52);
  EXPECT_DOUBLE_EQ(min_control_fraction(500, 10, 37), 0.74);
  EXPECT_THROW(min_halt_fraction(25, 5, 2), std::invalid_argument);
  EXPECT_THROW(min_halt_fraction(25, 5, 6), std::invalid_argument);
}

TEST(Fractions, HaltFractionMatchesDirectCount) {
  // s shards each need m - T + 1 withheld votes to stall.
  for (std::uint64_t n = 20; n <= 400; n += 19) {
    for (std::uint64_t s = 1; s <= 6; ++s) {
      const std::uint64_t m = n / s;
      for (std::uint64_t T = m / 2 + 1; T <= m; ++T) {
        const double direct = static_cast<double>(s * (m - T + 1)) / static_cast<double>(n);
        EXPECT_DOUBLE_EQ(min_halt_fraction(n, s, T), direct);
      }
    }
  }
}

TEST(DataRequirement, ReferenceConstants) {
  const ByteSizes sizes;
  EXPECT_EQ(data_requirement(sizes, 10, 150, 1500), 2'127'800u);
  EXPECT_EQ(data_requirement(sizes, 40, 500, 20000), 2'922'000u);
  EXPECT_EQ(data_requirement(ByteSizes::zero(), 40, 500, 20000), 0u);
}

TEST(DataRequirement, Throughput) {
  for (std::uint64_t s = 1; s <= 100; ++s) EXPECT_EQ(throughput(s, 2000), 2000 * s);
  EXPECT_THROW(throughput(0, 2000), std::invalid_argument);
}

TEST(Capacity, TableRowsAreConsistent) {
  const auto rows = capacity_table(1500, Probability(1e-6), ByteSizes{});
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front().s, 1u);
  EXPECT_EQ(rows.front().T, 751u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.m, 1500 / r.s);
    EXPECT_EQ(r.throughput, 2000 * r.s);
    EXPECT_EQ(r.data_requirement, data_requirement(ByteSizes{}, r.s, r.m, 1500));
    EXPECT_DOUBLE_EQ(r.control_fraction, static_cast<double>(r.T) / static_cast<double>(r.m));
    EXPECT_GT(r.control_fraction, 0.5);
  }
  EXPECT_EQ(rows.back().m, 20u);
}

TEST(Probability, RejectsOutOfRange) {
  EXPECT_THROW(Probability(-0.1), std::invalid_argument);
  EXPECT_THROW(Probability(1.5), std::invalid_argument);
  EXPECT_THROW(Probability(std::nan("")), std::invalid_argument);
}
