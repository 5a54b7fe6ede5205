#include "shardsim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <tuple>

#include "shardsim/analytics.hpp"
#include "shardsim/config.hpp"
#include "shardsim/kernels.hpp"
#include "shardsim/simengine.hpp"

namespace shardsim::cli {

namespace {

class BadInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string prob(double p) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(9) << p;
  return os.str();
}

std::string frac(double f) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(9) << f;
  return os.str();
}

struct SizeFlags {
  analytics::ByteSizes sizes;
  bool zero = false;

  void attach(CLI::App* app) {
    app->add_flag("--zero-sizes", zero, "Start from all-zero byte sizes");
    app->add_option("--header-bytes", sizes.header);
    app->add_option("--tx-bytes", sizes.transaction);
    app->add_option("--sig-bytes", sizes.signature);
    app->add_option("--committee-bytes", sizes.committee_per_node);
    app->add_option("--block-bytes", sizes.shard_block);
    app->add_option("--block-txs", sizes.txs_per_block);
  }

  // Explicit flags win over --zero-sizes.
  analytics::ByteSizes resolve(CLI::App* app) const {
    if (!zero) return sizes;
    analytics::ByteSizes out = analytics::ByteSizes::zero();
    auto given = [&](const char* name) { return app->count(name) > 0; };
    if (given("--header-bytes")) out.header = sizes.header;
    if (given("--tx-bytes")) out.transaction = sizes.transaction;
    if (given("--sig-bytes")) out.signature = sizes.signature;
    if (given("--committee-bytes")) out.committee_per_node = sizes.committee_per_node;
    if (given("--block-bytes")) out.shard_block = sizes.shard_block;
    if (given("--block-txs")) out.txs_per_block = sizes.txs_per_block;
    return out;
  }
};

void require_range(std::uint64_t lo, std::uint64_t hi, std::uint64_t n, const char* what) {
  if (lo == 0 || lo > hi || hi > n) {
    throw BadInput(std::string(what) + " range must satisfy 1 <= min <= max <= n");
  }
}

void write_summary_csv_header(std::ostream& out) {
  out << "fraction,seed,iterations_run,shard_halts,reassignments,global_halts,recoveries,final_s,final_T,"
         "total_finalized_tx,finalized_blocks,tampered_blocks,evictions\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharding protocol analysis and simulation"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Closed-form sweeps as CSV");
  analyze->require_subcommand(1);

  std::uint64_t n = 0, t = 0, s_min = 1, s_max = 0, m_min = 2, m_max = 0;
  double epsilon = 1e-6, fraction = 0.5, ratio = 0.7;
  std::optional<std::uint64_t> t_opt;

  auto* forest = analyze->add_subcommand("forest", "Hypergeometric failure per shard count");
  forest->add_option("--n", n)->required();
  forest->add_option("--t", t)->required();
  forest->add_option("--s-min", s_min);
  forest->add_option("--s-max", s_max);
  bool serial = false;
  forest->add_flag("--serial", serial, "Use the single-threaded kernel");

  auto* jury = analyze->add_subcommand("jury", "Colour-class failure per shard count");
  jury->add_option("--n", n)->required();
  jury->add_option("--fraction", fraction, "Adversary share of the seated population");
  jury->add_option("--t", t_opt, "Fixed adversary count instead of --fraction");
  jury->add_option("--ratio", ratio, "T = round(ratio * m)");
  jury->add_option("--s-min", s_min);
  jury->add_option("--s-max", s_max);

  auto* capacity = analyze->add_subcommand("capacity", "Per shard count: T, halt and control fractions, throughput, dr");
  capacity->add_option("--n", n)->required();
  capacity->add_option("--epsilon", epsilon);
  SizeFlags cap_sizes;
  cap_sizes.attach(capacity);

  auto* dr = analyze->add_subcommand("dr", "Per-node data requirement per shard count");
  dr->add_option("--n", n)->required();
  dr->add_option("--s-min", s_min);
  dr->add_option("--s-max", s_max);
  SizeFlags dr_sizes;
  dr_sizes.attach(dr);

  auto* threshold = analyze->add_subcommand("threshold", "Selected T per shard size");
  threshold->add_option("--m-min", m_min);
  threshold->add_option("--m-max", m_max)->required();
  threshold->add_option("--epsilon", epsilon);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> iterations;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario");
  simulate->add_option("--config", config_path)->required();
  simulate->add_option("--seed", seed);
  simulate->add_option("--iterations", iterations);
  simulate->add_option("--out", out_dir)->required();

  std::uint64_t seed_from = 1, seed_to = 1;
  std::vector<double> fractions;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over seeds and adversary fractions");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--seed-from", seed_from);
  sweep->add_option("--seed-to", seed_to);
  sweep->add_option("--fraction", fractions, "Adversary fractions (repeatable)");
  sweep->add_option("--iterations", iterations);
  sweep->add_flag("--serial", serial, "Run the scenarios one after another");

  std::uint64_t s = 0;
  std::string strategy = "halt-maximal";
  std::optional<std::uint64_t> forced_T;
  auto* halt = app.add_subcommand("halt-threshold", "Smallest adversary count that halts every shard");
  halt->add_option("--n", n)->required();
  halt->add_option("--s", s)->required();
  halt->add_option("--strategy", strategy);
  halt->add_option("--forced-t", forced_T);
  halt->add_option("--config", config_path, "Base scenario for the probes");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    if (*forest) {
      if (s_max == 0) s_max = n;
      require_range(s_min, s_max, n, "shard");
      if (t > n) throw BadInput("t must not exceed n");
      const auto probs = serial ? kernels::forest_sweep_serial(n, t, s_min, s_max)
                                : kernels::forest_sweep_parallel(n, t, s_min, s_max);
      out << "s,m,failure_prob\n";
      for (std::uint64_t k = s_min; k <= s_max; ++k) {
        out << k << ',' << n / k << ',' << prob(probs[k - s_min]) << '\n';
      }
    } else if (*jury) {
      if (s_max == 0) s_max = n;
      require_range(s_min, s_max, n, "shard");
      if (!(ratio > 0.5 && ratio <= 1.0)) throw BadInput("ratio must lie in (0.5, 1]");
      if (!(fraction >= 0.0 && fraction < 1.0)) throw BadInput("fraction must lie in [0, 1)");
      out << "s,m,T,t,failure_exact,failure_approx\n";
      for (std::uint64_t k = s_min; k <= s_max; ++k) {
        const std::uint64_t m = n / k;
        const std::uint64_t T = analytics::ratio_threshold(m, ratio);
        const std::uint64_t tt = t_opt ? *t_opt
                                       : static_cast<std::uint64_t>(fraction * static_cast<double>(m * k) + 1e-9);
        out << k << ',' << m << ',' << T << ',' << tt << ','
            << prob(analytics::jury_failure_prob(tt, T, k, analytics::JuryMode::Exact).value()) << ','
            << prob(analytics::jury_failure_prob(tt, T, k, analytics::JuryMode::Approx).value()) << '\n';
      }
    } else if (*capacity) {
      const auto rows = analytics::capacity_table(n, analytics::Probability(epsilon), cap_sizes.resolve(capacity));
      out << "s,m,T,halt_fraction,control_fraction,throughput,dr\n";
      for (const auto& r : rows) {
        out << r.s << ',' << r.m << ',' << r.T << ',' << frac(r.halt_fraction) << ','
            << frac(r.control_fraction) << ',' << r.throughput << ',' << r.data_requirement << '\n';
      }
    } else if (*dr) {
      if (s_max == 0) s_max = n;
      require_range(s_min, s_max, n, "shard");
      const auto sizes = dr_sizes.resolve(dr);
      out << "s,m,dr\n";
      for (std::uint64_t k = s_min; k <= s_max; ++k) {
        out << k << ',' << n / k << ',' << analytics::data_requirement(sizes, k, n / k, n) << '\n';
      }
    } else if (*threshold) {
      if (m_min == 0 || m_min > m_max) throw BadInput("m range must satisfy 1 <= min <= max");
      const analytics::Probability eps(epsilon);
      out << "m,T,ratio\n";
      for (std::uint64_t m = m_min; m <= m_max; ++m) {
        const auto T = analytics::select_threshold(m, eps);
        if (!T) continue;
        out << m << ',' << *T << ',' << frac(static_cast<double>(*T) / static_cast<double>(m)) << '\n';
      }
    } else if (*simulate) {
      auto cfg = sim::load_config(config_path);
      if (seed) cfg.seed = *seed;
      if (iterations) cfg.iterations = *iterations;
      const auto result = sim::run(cfg);
      std::filesystem::create_directories(out_dir);
      const std::filesystem::path dir(out_dir);
      std::ofstream metrics(dir / "metrics.csv"), events(dir / "events.log"), summary(dir / "summary.txt");
      if (!metrics || !events || !summary) throw BadInput("cannot write into '" + out_dir + "'");
      sim::write_metrics_csv(metrics, result.metrics);
      result.events.write(events);
      sim::write_summary(summary, result.summary);
      sim::write_summary(out, result.summary);
    } else if (*sweep) {
      const auto base = sim::load_config(config_path);
      if (seed_from > seed_to) throw BadInput("--seed-from must not exceed --seed-to");
      if (fractions.empty()) fractions.push_back(base.adversary_fraction);
      std::sort(fractions.begin(), fractions.end());
      fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());
      std::vector<sim::ScenarioConfig> configs;
      for (const double f : fractions) {
        for (std::uint64_t sd = seed_from; sd <= seed_to; ++sd) {
          auto c = base;
          c.adversary_fraction = f;
          c.adversary_count.reset();
          c.seed = sd;
          if (iterations) c.iterations = *iterations;
          c.validate();
          configs.push_back(c);
        }
      }
      const auto results = serial ? kernels::sweep_serial(configs) : kernels::sweep_parallel(configs);
      write_summary_csv_header(out);
      for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& r = results[i];
        out << frac(configs[i].adversary_fraction) << ',' << configs[i].seed << ',' << r.iterations_run << ','
            << r.shard_halts << ',' << r.reassignments << ',' << r.global_halts << ',' << r.recoveries << ','
            << r.final_s << ',' << r.final_T << ',' << r.total_finalized_tx << ',' << r.finalized_blocks << ','
            << r.tampered_blocks << ',' << r.evictions << '\n';
      }
    } else if (*halt) {
      sim::ScenarioConfig base;
      if (!config_path.empty()) base = sim::load_config(config_path);
      if (s == 0 || s > n) throw BadInput("s must lie in [1, n]");
      sim::AdversaryStrategy strat{sim::parse_strategy(strategy), base.strategy.classes};
      const std::uint64_t m = n / s;
      std::uint64_t T = 0;
      if (forced_T) {
        T = *forced_T;
      } else if (auto pt = base.threshold.threshold(m, s)) {
        T = *pt;
      } else {
        throw sim::InfeasibleScenario("no feasible threshold for m = " + std::to_string(m));
      }
      if (T <= m / 2 || T > m) throw BadInput("forced T must lie in (m/2, m]");
      const auto measured = sim::measure_halt_threshold(n, s, strat, forced_T, base);
      const double predicted = static_cast<double>(n) * analytics::min_halt_fraction(n, s, T);
      out << "n,s,m,T,measured,predicted\n"
          << n << ',' << s << ',' << m << ',' << T << ',' << measured << ',' << frac(predicted) << '\n';
    }
  } catch (const sim::InfeasibleScenario& e) {
    err << "infeasible scenario: " << e.what() << '\n';
    return kInfeasible;
  } catch (const sim::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kBadInput;
  } catch (const BadInput& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kOk;
}

}  // namespace shardsim::cli
