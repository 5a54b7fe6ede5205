#include "shardsim/analytics.hpp"

#include <algorithm>
#include <cmath>

namespace shardsim::analytics {

namespace {

mpz_class binomial(std::uint64_t n, std::uint64_t k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

void check_population(std::uint64_t n, std::uint64_t t, std::uint64_t m) {
  if (n == 0) throw std::invalid_argument("population must be positive");
  if (t > n) throw std::invalid_argument("adversary count exceeds population");
  if (m == 0 || m > n) throw std::invalid_argument("shard size must lie in [1, n]");
}

}  // namespace

mpq_class forest_failure_exact(std::uint64_t n, std::uint64_t t, std::uint64_t m) {
  check_population(n, t, m);
  const std::uint64_t honest = n - t;
  const std::uint64_t lo = std::max<std::uint64_t>(m / 2 + 1, m > honest ? m - honest : 0);
  const std::uint64_t hi = std::min(m, t);
  mpz_class tail = 0;
  if (lo <= hi) {
    // C(t, x) * C(n - t, m - x), stepped in x with exact divisions.
    mpz_class a = binomial(t, lo);
    mpz_class b = binomial(honest, m - lo);
    for (std::uint64_t x = lo;; ++x) {
      tail += a * b;
      if (x == hi) break;
      a *= t - x;
      mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), x + 1);
      const std::uint64_t r = m - x;  // current lower index of the honest term
      b *= r;
      mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), honest - r + 1);
    }
  }
  mpq_class p(tail, binomial(n, m));
  p.canonicalize();
  return p;
}

Probability forest_failure_prob(std::uint64_t n, std::uint64_t t, std::uint64_t m) {
  return Probability(forest_failure_exact(n, t, m).get_d());
}

std::uint64_t max_shards_forest(std::uint64_t n, std::uint64_t t, Probability epsilon) {
  check_population(n, t, 1);
  const mpq_class eps(epsilon.value());
  std::uint64_t last_m = 0;
  bool last_ok = false;
  for (std::uint64_t s = n; s >= 1; --s) {
    const std::uint64_t m = n / s;
    if (m != last_m) {
      last_ok = forest_failure_exact(n, t, m) <= eps;
      last_m = m;
    }
    if (last_ok) return s;
  }
  return 0;
}

std::vector<std::uint64_t> optimal_adversary_allocation(std::uint64_t t, std::uint64_t T,
                                                        std::uint64_t classes,
                                                        std::optional<std::uint64_t> cap) {
  if (T == 0 || T > classes) throw std::invalid_argument("threshold must lie in [1, classes]");
  if (cap && t > T * *cap) {
    throw std::domain_error("adversary count exceeds T full classes");
  }
  std::vector<std::uint64_t> a(classes, 0);
  const std::uint64_t q = t / T;
  const std::uint64_t r = t % T;
  for (std::uint64_t i = 0; i < T; ++i) a[i] = i < r ? q + 1 : q;
  return a;
}

mpq_class jury_failure_exact(std::uint64_t t, std::uint64_t T, std::uint64_t s) {
  if (s == 0 || T == 0) throw std::invalid_argument("shards and threshold must be positive");
  if (t >= T * s) return mpq_class(1);
  const auto a = optimal_adversary_allocation(t, T, T);
  mpz_class num = 1;
  for (auto v : a) num *= v;
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), s, T);
  mpq_class p(num, den);
  p.canonicalize();
  return p;
}

Probability jury_failure_prob(std::uint64_t t, std::uint64_t T, std::uint64_t s, JuryMode mode) {
  if (s == 0 || T == 0) throw std::invalid_argument("shards and threshold must be positive");
  if (t >= T * s) return Probability(1.0);
  if (mode == JuryMode::Approx) {
    const long double ratio = static_cast<long double>(t) / (static_cast<long double>(T) * s);
    return Probability(static_cast<double>(std::pow(ratio, static_cast<long double>(T))));
  }
  const std::uint64_t q = t / T;
  const std::uint64_t r = t % T;
  const long double sd = static_cast<long double>(s);
  long double p = std::pow((q + 1) / sd, static_cast<long double>(r)) *
                  std::pow(q / sd, static_cast<long double>(T - r));
  return Probability(static_cast<double>(std::clamp(p, 0.0L, 1.0L)));
}

std::uint64_t ratio_threshold(std::uint64_t m, double ratio) {
  if (m == 0) throw std::invalid_argument("shard size must be positive");
  auto T = static_cast<std::uint64_t>(std::llround(ratio * static_cast<double>(m)));
  return std::clamp<std::uint64_t>(T, m / 2 + 1, m);
}

std::uint64_t max_shards_jury(std::uint64_t n, double adversary_fraction, double ratio,
                              Probability epsilon) {
  if (n == 0) throw std::invalid_argument("population must be positive");
  if (!(adversary_fraction >= 0.0 && adversary_fraction < 1.0)) {
    throw std::invalid_argument("adversary fraction must lie in [0, 1)");
  }
  std::uint64_t best = 0;
  for (std::uint64_t s = 1; s <= n; ++s) {
    const std::uint64_t m = n / s;
    const std::uint64_t T = ratio_threshold(m, ratio);
    const auto t = static_cast<std::uint64_t>(adversary_fraction * static_cast<double>(m * s));
    if (jury_failure_prob(t, T, s).value() <= epsilon.value()) best = s;
  }
  return best;
}

std::optional<std::uint64_t> select_threshold(std::uint64_t m, Probability epsilon) {
  if (m == 0) throw std::invalid_argument("shard size must be positive");
  if (!(epsilon.value() > 0.0 && epsilon.value() < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  const long double log_eps = std::log(static_cast<long double>(epsilon.value()));
  const long double log_m = std::log(static_cast<long double>(m));
  for (std::uint64_t T = m / 2 + 1; T <= m; ++T) {
    const long double lhs =
        static_cast<long double>(T) * (log_m - std::log(2.0L * static_cast<long double>(T)));
    if (lhs <= log_eps) return T;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> protocol_threshold(std::uint64_t m, std::uint64_t s,
                                                Probability epsilon) {
  if (s == 0 || m == 0) throw std::invalid_argument("shard count and size must be positive");
  if (s == 1) return m / 2 + 1;
  return select_threshold(m, epsilon);
}

namespace {
std::uint64_t checked_shard_size(std::uint64_t n, std::uint64_t s, std::uint64_t T) {
  if (n == 0 || s == 0 || s > n) throw std::invalid_argument("need 1 <= s <= n");
  const std::uint64_t m = n / s;
  if (T == 0 || T > m || 2 * T <= m) throw std::invalid_argument("need m/2 < T <= m");
  return m;
}
}  // namespace

double min_halt_fraction(std::uint64_t n, std::uint64_t s, std::uint64_t T) {
  const std::uint64_t m = checked_shard_size(n, s, T);
  return static_cast<double>(s * (m - T + 1)) / static_cast<double>(n);
}

double min_control_fraction(std::uint64_t n, std::uint64_t s, std::uint64_t T) {
  const std::uint64_t m = checked_shard_size(n, s, T);
  return static_cast<double>(T) / static_cast<double>(m);
}

std::uint64_t data_requirement(const ByteSizes& sizes, std::uint64_t s, std::uint64_t m,
                               std::uint64_t n) {
  return sizes.header * s + sizes.transaction * sizes.txs_per_block + sizes.signature * m +
         sizes.committee_per_node * n + sizes.shard_block;
}

std::uint64_t throughput(std::uint64_t s, std::uint64_t txs_per_block) {
  if (s == 0) throw std::invalid_argument("throughput needs at least one shard");
  return s * txs_per_block;
}

std::vector<CapacityPoint> capacity_table(std::uint64_t n, Probability epsilon,
                                          const ByteSizes& sizes) {
  if (n == 0) throw std::invalid_argument("population must be positive");
  std::vector<CapacityPoint> rows;
  for (std::uint64_t s = 1; s <= n; ++s) {
    const std::uint64_t m = n / s;
    const auto T = protocol_threshold(m, s, epsilon);
    if (!T) continue;
    rows.push_back({s, m, *T, min_halt_fraction(n, s, *T), min_control_fraction(n, s, *T),
                    throughput(s, sizes.txs_per_block), data_requirement(sizes, s, m, n)});
  }
  return rows;
}

}  // namespace shardsim::analytics
