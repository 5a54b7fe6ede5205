#include "shardsim/simengine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "shardsim/analytics.hpp"
#include "shardsim/assignment.hpp"
#include "shardsim/recovery.hpp"

namespace shardsim::sim {

using membership::NodeRecord;

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << "iteration,s,m,T,finalized_tx,halted_shards,recoveries,dr_bytes_per_node,pending_nodes,"
        "pending_tx_total\n";
  for (const auto& r : rows) {
    os << r.iteration << ',' << r.s << ',' << r.m << ',' << r.T << ',' << r.finalized_tx << ','
       << r.halted_shards << ',' << r.recoveries << ',' << r.dr_bytes_per_node << ','
       << r.pending_nodes << ',' << r.pending_tx_total << '\n';
  }
}

void write_summary(std::ostream& os, const RunSummary& s) {
  os << "iterations_run = " << s.iterations_run << '\n'
     << "shard_halts = " << s.shard_halts << '\n'
     << "reassignments = " << s.reassignments << '\n'
     << "global_halts = " << s.global_halts << '\n'
     << "recoveries = " << s.recoveries << '\n'
     << "final_s = " << s.final_s << '\n'
     << "final_T = " << s.final_T << '\n'
     << "total_finalized_tx = " << s.total_finalized_tx << '\n'
     << "finalized_blocks = " << s.finalized_blocks << '\n'
     << "tampered_blocks = " << s.tampered_blocks << '\n'
     << "evictions = " << s.evictions << '\n'
     << "first_global_halt = "
     << (s.first_global_halt ? std::to_string(*s.first_global_halt) : "none") << '\n'
     << "first_finalize_after_global_halt = "
     << (s.first_finalize_after_global_halt ? std::to_string(*s.first_finalize_after_global_halt)
                                            : "none")
     << '\n';
}

std::vector<ColourCode> adversary_report_colours(const AdversaryStrategy& strategy,
                                                 std::vector<ColourCode> honest, std::size_t s,
                                                 std::size_t m, std::size_t T, std::size_t count,
                                                 Rng& rng) {
  std::vector<ColourCode> out;
  out.reserve(count);
  auto uniform = [&] { return ColourCode(static_cast<std::uint32_t>(rng.below(ColourCode::kLimit))); };

  switch (strategy.kind) {
    case StrategyKind::Random:
      for (std::size_t i = 0; i < count; ++i) out.push_back(uniform());
      return out;

    case StrategyKind::ConcentrateClasses:
    case StrategyKind::HaltMaximal: {
      const std::size_t k = strategy.kind == StrategyKind::HaltMaximal
                                ? (T <= m ? m - T + 1 : 1)
                                : strategy.classes;
      const std::size_t packed = std::min(count, k * s);
      // The bottom of the spectrum sorts ahead of every honest claim, so the
      // packed nodes fill the lowest classes.
      for (std::size_t i = 0; i < packed; ++i) out.emplace_back(0);
      for (std::size_t i = packed; i < count; ++i) out.push_back(uniform());
      return out;
    }

    case StrategyKind::ControlMaximal: {
      std::sort(honest.begin(), honest.end());
      const std::size_t placed = std::min(count, T * s);
      const auto alloc = analytics::optimal_adversary_allocation(placed, T, std::max(m, T), s);
      std::size_t next = 0;  // next honest colour in sorted order
      auto gap_colour = [&] {
        std::uint32_t c = next > 0 ? honest[next - 1].value() + 1 : 0;
        if (next < honest.size() && c > honest[next].value()) c = honest[next].value();
        return ColourCode(std::min<std::uint32_t>(c, ColourCode::kLimit - 1));
      };
      for (std::size_t cls = 0; cls < alloc.size(); ++cls) {
        for (std::uint64_t a = 0; a < alloc[cls]; ++a) out.push_back(gap_colour());
        next = std::min(honest.size(), next + (s - static_cast<std::size_t>(alloc[cls])));
      }
      for (std::size_t i = placed; i < count; ++i) out.push_back(uniform());
      return out;
    }
  }
  return out;
}

namespace {

NodeId make_id(const Digest& digest, std::uint64_t seed, std::uint64_t index) {
  ByteWriter w;
  w.text("node");
  w.u64(seed);
  w.u64(index);
  const Hash32 h = digest(w.view());
  std::array<std::uint8_t, NodeId::kSize> b{};
  b[0] = 0x02;
  std::copy(h.begin(), h.end(), b.begin() + 1);
  return NodeId(b);
}

std::string kv(std::initializer_list<std::pair<const char*, std::string>> items) {
  std::string out;
  for (const auto& [k, v] : items) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

std::string num(std::uint64_t v) { return std::to_string(v); }

class Engine {
 public:
  Engine(const ScenarioConfig& cfg, std::vector<NodeRecord> population, const RunHooks& hooks)
      : cfg_(cfg),
        hooks_(hooks),
        digest_(cfg.digest),
        rng_(Rng::stream(cfg.seed, 2)),
        population_(std::move(population)),
        hashes_(digest_, cfg.genesis_seed, 0),
        sync_(cfg.conflict_window),
        result_{{}, consensus::EventLog(digest_), {}, {}, {}} {
    for (std::size_t i = 0; i < population_.size(); ++i) {
      if (!index_.emplace(population_[i].id, i).second) {
        throw InfeasibleScenario("duplicate node id in population");
      }
    }
    online_.assign(population_.size(), 1);
  }

  RunResult run() {
    bootstrap();
    for (Iteration it = 1; it <= cfg_.iterations; ++it) {
      if (!step(it)) break;
    }
    auto& sum = result_.summary;
    sum.final_s = assignment_.shard_count();
    sum.final_T = T_;
    return std::move(result_);
  }

 private:
  bool online(const NodeRecord& r) const { return online_[index_.at(r.id)] != 0; }
  std::size_t shards() const { return assignment_.shard_count(); }
  std::size_t shard_size() const { return assignment_.class_count(); }

  void bootstrap() {
    pending_ = membership::PendingSection(population_);
    const std::size_t s0 = cfg_.initial_shards;
    const auto forced = cfg_.initial_threshold;
    auto accept = [&](std::size_t mt) {
      if (forced) return *forced <= mt && 2 * *forced > mt;
      return cfg_.threshold.feasible(mt, s0);
    };
    auto best = membership::find_best_scheme({}, pending_, s0, accept);
    if (!best) {
      throw InfeasibleScenario("no admissible grouping of " + num(population_.size()) +
                               " nodes into " + num(s0) + " shards with a feasible threshold");
    }
    const std::size_t mt = best->scheme.groups.size();
    T_ = forced ? *forced : *cfg_.threshold.threshold(mt, s0);
    for (const auto& g : best->scheme.groups) {
      for (const auto& r : g) pending_.remove(r.id);
    }

    membership::MemberMatrix grouping(best->scheme.groups);
    for (const auto& cls : grouping.classes()) {
      result_.bootstrap_class_adversaries.push_back(static_cast<std::uint64_t>(std::count_if(
          cls.begin(), cls.end(), [](const NodeRecord& r) { return r.is_adversary; })));
    }
    committee_.height = 0;
    committee_.digest_name = digest_.name();
    committee_.pending = pending_;
    committee_.members = grouping;
    committee_.seal(digest_);
    assignment_ = assignment::reassign(digest_, grouping, committee_.c_hash);
    resize_shards(s0, /*keep_tx=*/false);

    result_.events.record(0, -1, "bootstrap",
                          kv({{"s", num(s0)}, {"m", num(mt)}, {"T", num(T_)},
                              {"admitted", num(grouping.size())}, {"pending", num(pending_.size())},
                              {"c_hash", to_hex(committee_.c_hash)}}));
  }

  void resize_shards(std::size_t s, bool keep_tx = true) {
    statuses_.assign(s, {});
    hashes_.resize(s);
    heights_.resize(s, 0);
    std::uint64_t total = 0;
    if (keep_tx) {
      for (auto p : pending_tx_) total += p;
    }
    pending_tx_.assign(s, total / s);
    for (std::size_t j = 0; j < total % s; ++j) ++pending_tx_[j];
    rebucket_offline(s);
  }

  // Moves not-yet-reported offline marks to the shard each node now sits in.
  void rebucket_offline(std::size_t s) {
    std::set<NodeId> marks;
    for (const auto& set : pending_offline_) marks.insert(set.begin(), set.end());
    pending_offline_.assign(s, {});
    if (marks.empty()) return;
    for (std::size_t j = 0; j < s; ++j) {
      for (const auto& r : assignment_.shard(j)) {
        if (marks.count(r.id)) pending_offline_[j].insert(r.id);
      }
    }
  }

  struct Finalized {
    consensus::ShardBlockHeader header;
    std::vector<consensus::Signature> signatures;
    std::vector<NodeRecord> members;
  };

  bool step(Iteration it) {
    auto& sum = result_.summary;
    sum.iterations_run = it;

    for (std::size_t i = 0; i < population_.size(); ++i) {
      const auto& r = population_[i];
      bool skip = false;
      if (!r.is_adversary) {
        skip = hooks_.skip_pow ? hooks_.skip_pow(r, it) : rng_.bernoulli(cfg_.churn_prob);
      }
      online_[i] = skip ? 0 : 1;
    }

    const std::size_t s = shards();
    const std::size_t m = shard_size();
    if (cfg_.tx_arrival_rate > 0) {
      const std::uint64_t base = cfg_.tx_arrival_rate / s;
      const std::uint64_t rem = cfg_.tx_arrival_rate % s;
      const std::size_t start = rem ? static_cast<std::size_t>(rng_.below(s)) : 0;
      for (std::size_t j = 0; j < s; ++j) {
        pending_tx_[j] += base + (((j + s - start) % s) < rem ? 1 : 0);
      }
      arrived_total_ += cfg_.tx_arrival_rate;
    }

    const auto row = hashes_.row(it - 1);
    std::uint64_t finalized_tx = 0;
    std::uint64_t finalized_blocks = 0;
    bool committee_finalized = false;
    std::uint32_t committee_approvals = 0;
    std::vector<Finalized> finalized;

    for (std::size_t j = 0; j < s; ++j) {
      const auto members = assignment_.shard(j);
      std::vector<NodeId> ids;
      ids.reserve(m);
      for (const auto& r : members) ids.push_back(r.id);

      const std::uint32_t round = statuses_[j].failed_rounds;
      const std::size_t leader_idx =
          consensus::select_leader(digest_, row, j, m, round, cfg_.leader_rule);
      const NodeRecord& leader = members[leader_idx];

      std::optional<consensus::ShardBlockHeader> proposal;
      if (online(leader) &&
          (!leader.is_adversary || cfg_.strategy.kind == StrategyKind::ControlMaximal)) {
        consensus::ShardBlockHeader h;
        h.shard_id = static_cast<std::uint32_t>(j);
        h.height = heights_[j] + 1;
        h.prev_hash = row[j];
        h.valid_content = !leader.is_adversary;
        h.tx_count = h.valid_content ? std::min(pending_tx_[j], cfg_.sizes.txs_per_block) : 0;
        h.pending_tx_count = pending_tx_[j] - h.tx_count;
        h.offline_ids.assign(pending_offline_[j].begin(), pending_offline_[j].end());
        h.proposer = leader.id;
        h.round = round;
        h.seal(digest_);
        proposal = std::move(h);
      }
      const Hash32 block_hash = proposal ? proposal->hash : Hash32{};

      std::vector<consensus::Vote> votes;
      votes.reserve(m);
      for (const auto& r : members) {
        if (!online(r)) continue;
        consensus::Vote v;
        v.voter = r.id;
        v.block_hash = block_hash;
        v.pow = {true, r.declared_difficulty};
        // Honest members approve valid content; the adversary signs only its
        // own proposals.
        v.approve = proposal && (r.is_adversary ? !proposal->valid_content : proposal->valid_content);
        if (v.approve) v.signature = consensus::Signature{r.id, block_hash, true};
        votes.push_back(std::move(v));
      }
      auto t = consensus::tally(votes, block_hash, static_cast<std::uint32_t>(T_), ids);

      if (proposal && t.outcome == consensus::Outcome::Finalized) {
        auto& h = *proposal;
        h.approval_count = t.approvals;
        hashes_.finalize(j, it, h.hash);
        heights_[j] = h.height;
        pending_tx_[j] -= h.tx_count;
        finalized_tx += h.tx_count;
        ++finalized_blocks;
        pending_offline_[j] = std::set<NodeId>(t.offline_ids.begin(), t.offline_ids.end());
        statuses_[j].record_finalized();
        if (!h.valid_content) {
          ++sum.tampered_blocks;
          result_.events.record(it, static_cast<std::int64_t>(j), "tampered", kv({{"hash", to_hex(h.hash)}}));
        }
        result_.events.record(it, static_cast<std::int64_t>(j), "finalized",
                              kv({{"height", num(h.height)}, {"tx", num(h.tx_count)},
                                  {"approvals", num(t.approvals)}, {"offline", num(h.offline_ids.size())},
                                  {"hash", to_hex(h.hash)}}));
        if (j == 0) {
          committee_finalized = true;
          committee_approvals = t.approvals;
        }
        if (sum.first_global_halt && !sum.first_finalize_after_global_halt) {
          sum.first_finalize_after_global_halt = it;
        }
        if (hooks_.record_headers) result_.finalized_headers.push_back(h);
        sync_.announce(h, it);
        finalized.push_back({h, std::move(t.signatures), members});
      } else {
        pending_offline_[j].insert(t.offline_ids.begin(), t.offline_ids.end());
        const bool was_halted = statuses_[j].state == consensus::ShardState::Halted;
        statuses_[j].record_abandoned(cfg_.halt_rounds);
        result_.events.record(it, static_cast<std::int64_t>(j), "abandoned",
                              kv({{"round", num(round)}, {"approvals", num(t.approvals)},
                                  {"proposal", proposal ? "1" : "0"}}));
        if (!was_halted && statuses_[j].state == consensus::ShardState::Halted) {
          ++sum.shard_halts;
          result_.events.record(it, static_cast<std::int64_t>(j), "shard-halted",
                                kv({{"failed_rounds", num(statuses_[j].failed_rounds)}}));
        }
      }
    }
    sum.total_finalized_tx += finalized_tx;
    sum.finalized_blocks += finalized_blocks;

    synchronise(it, finalized);
    if (committee_finalized) update_committee(it, committee_approvals);

    const auto halted = static_cast<std::uint64_t>(
        std::count_if(statuses_.begin(), statuses_.end(), [](const consensus::ShardStatus& st) {
          return st.state == consensus::ShardState::Halted;
        }));
    const bool stop = handle_halts(it);

    MetricsRow r;
    r.iteration = it;
    r.s = shards();
    r.m = shard_size();
    r.T = T_;
    r.finalized_tx = finalized_tx;
    r.halted_shards = halted;
    r.recoveries = sum.recoveries;
    r.population = assignment_.size() + pending_.size();
    r.dr_bytes_per_node = analytics::data_requirement(cfg_.sizes, r.s, r.m, r.population);
    r.pending_nodes = pending_.size();
    for (auto p : pending_tx_) r.pending_tx_total += p;
    r.arrived_tx_total = arrived_total_;
    r.finalized_blocks = finalized_blocks;
    result_.metrics.push_back(r);
    return !stop;
  }

  void synchronise(Iteration it, const std::vector<Finalized>& finalized) {
    for (const auto& f : finalized) {
      const auto& h = f.header;
      std::optional<NodeId> reporter;
      for (const auto& r : f.members) {
        if (!online(r)) continue;
        // Honest members oppose tampered blocks; a conflict-raising adversary
        // opposes honest ones.
        const bool opposes = h.valid_content ? (r.is_adversary && cfg_.adversary_reports_conflicts)
                                             : !r.is_adversary;
        if (opposes) {
          reporter = r.id;
          break;
        }
      }
      if (!reporter) continue;
      sync_.report_conflict(*reporter, h.hash);
      result_.events.record(it, h.shard_id, "conflict", kv({{"reporter", reporter->hex()}}));
      std::vector<NodeId> ids;
      for (const auto& r : f.members) ids.push_back(r.id);
      const auto verdict = sync_.submit_bundle(h.hash, f.signatures, ids, static_cast<std::uint32_t>(T_));
      result_.events.record(it, h.shard_id, "verify",
                            kv({{"verdict", verdict == consensus::SyncVerdict::Accepted ? "accepted" : "rejected"},
                                {"signatures", num(f.signatures.size())}}));
    }
    for (const auto& res : sync_.resolve(it)) {
      if (res.verdict != consensus::SyncVerdict::Accepted) continue;
      evict_queue_.insert(res.header.offline_ids.begin(), res.header.offline_ids.end());
    }
    for (const auto& id : sync_.take_refuted_reporters()) {
      evict_queue_.insert(id);
      result_.events.record(it, -1, "labelled-offline", kv({{"node", id.hex()}}));
    }
  }

  void update_committee(Iteration it, std::uint32_t approvals) {
    auto& sum = result_.summary;
    std::vector<NodeRecord> members;
    std::size_t evicted = 0;
    for (const auto& r : assignment_.all()) {
      if (evict_queue_.count(r.id)) {
        NodeRecord back = r;
        back.reported_at = it;
        back.pending_since = it;
        pending_.append(back);
        ++evicted;
      } else {
        members.push_back(r);
      }
    }
    evict_queue_.clear();
    sum.evictions += evicted;

    // Pending nodes that skipped their PoW lose their place in the queue.
    std::vector<NodeRecord> lapsed;
    for (const auto& r : pending_.records()) {
      if (!online(r)) lapsed.push_back(r);
    }
    for (auto& r : lapsed) {
      pending_.remove(r.id);
      r.pending_since = it;
      pending_.append(r);
    }

    const std::size_t s = shards();
    const std::size_t population = members.size() + pending_.size();
    std::uint64_t s_max = cfg_.threshold.max_shards(population);
    if (cfg_.max_shards > 0) s_max = std::min<std::uint64_t>(s_max, cfg_.max_shards);
    const std::size_t st =
        cfg_.scaling ? membership::target_shard_count(s, pending_tx_, cfg_.K, s_max) : s;

    std::optional<membership::MemberMatrix> regrouped;
    if (evicted > 0 || st != s || !pending_.empty()) {
      std::vector<std::size_t> order{st};
      if (st != s) order.push_back(s);
      for (std::size_t c = std::min(st, s); c-- > 1;) order.push_back(c);
      for (const std::size_t cand : order) {
        auto best = membership::find_best_scheme(
            members, pending_, cand, [&](std::size_t mt) { return cfg_.threshold.feasible(mt, cand); });
        if (!best) continue;
        if (cand == s && evicted == 0 && best->snp == 0) break;
        const std::size_t mt = best->scheme.groups.size();
        const std::uint64_t old_T = T_;
        T_ = *cfg_.threshold.threshold(mt, cand);
        for (const auto& g : best->scheme.groups) {
          for (const auto& r : g) pending_.remove(r.id);
        }
        regrouped = membership::MemberMatrix(best->scheme.groups);
        result_.events.record(it, 0, "regroup",
                              kv({{"old_s", num(s)}, {"new_s", num(cand)}, {"old_T", num(old_T)},
                                  {"new_T", num(T_)}, {"admitted", num(best->snp)},
                                  {"evicted", num(evicted)}, {"target", num(st)}}));
        break;
      }
    }

    committee_.prev_hash = committee_.c_hash;
    ++committee_.height;
    committee_.pending = pending_;
    committee_.members = regrouped ? *regrouped : assignment_;
    committee_.approvals = approvals;
    committee_.seal(digest_);
    reshuffles_ = 0;

    if (regrouped) {
      assignment_ = assignment::reassign(digest_, *regrouped, committee_.c_hash);
      resize_shards(assignment_.shard_count());
    }
  }

  bool handle_halts(Iteration it) {
    auto& sum = result_.summary;
    const std::size_t s = shards();
    const auto halted = static_cast<std::size_t>(
        std::count_if(statuses_.begin(), statuses_.end(), [&](const consensus::ShardStatus& st) {
          return recovery::shard_halted(st, cfg_.halt_rounds);
        }));
    global_streak_ = halted == s ? global_streak_ + 1 : 0;
    if (halted < s) global_halted_ = false;

    if (global_streak_ >= cfg_.global_window && !global_halted_) {
      global_streak_ = 0;
      ++sum.global_halts;
      if (!sum.first_global_halt) sum.first_global_halt = it;
      result_.events.record(it, -1, "global-halt", kv({{"s", num(s)}, {"T", num(T_)}}));
      // One event per episode. A single shard cannot shrink further; its
      // round counter keeps climbing so the leader keeps rotating.
      if (!cfg_.recovery || s == 1) {
        global_halted_ = true;
        return cfg_.stop_on_global_halt;
      }
      const auto members = assignment_.all();
      const Hash32 seed = assignment::reshuffle_seed(digest_, committee_.c_hash, ++reshuffles_);
      auto rg = recovery::on_global_halt(digest_, members, pending_, s, cfg_.threshold, seed);
      for (const auto& g : rg.scheme.groups) {
        for (const auto& r : g) pending_.remove(r.id);
      }
      const std::uint64_t old_T = T_;
      assignment_ = std::move(rg.assignment);
      T_ = rg.threshold;
      resize_shards(rg.shards);
      ++sum.recoveries;
      result_.events.record(it, -1, "recovery",
                            kv({{"old_s", num(s)}, {"new_s", num(rg.shards)}, {"old_T", num(old_T)},
                                {"new_T", num(T_)}, {"trigger", "global-halt"}}));
      return cfg_.stop_on_global_halt;
    }

    if (cfg_.recovery && halted > 0 && halted < s) {
      recovery::SystemView view{assignment_, statuses_, committee_.c_hash, reshuffles_};
      auto res = recovery::on_shard_halt(digest_, std::move(view), cfg_.halt_rounds);
      if (res.action == recovery::HaltAction::Reassigned) {
        assignment_ = std::move(res.system.assignment);
        statuses_ = std::move(res.system.statuses);
        reshuffles_ = res.system.reshuffles;
        rebucket_offline(shards());
        ++sum.reassignments;
        result_.events.record(it, -1, "reassign",
                              kv({{"halted", num(halted)}, {"reshuffle", num(reshuffles_)}}));
      }
    }
    return false;
  }

  const ScenarioConfig& cfg_;
  const RunHooks& hooks_;
  Digest digest_;
  Rng rng_;
  std::vector<NodeRecord> population_;
  std::map<NodeId, std::size_t> index_;
  std::vector<char> online_;

  membership::MemberMatrix assignment_;
  membership::PendingSection pending_;
  std::uint64_t T_ = 0;
  std::vector<consensus::ShardStatus> statuses_;
  consensus::HashLedger hashes_;
  std::vector<std::uint64_t> heights_;
  std::vector<std::uint64_t> pending_tx_;
  std::vector<std::set<NodeId>> pending_offline_;
  std::set<NodeId> evict_queue_;
  membership::CommitteeBlock committee_;
  std::uint64_t reshuffles_ = 0;
  std::uint32_t global_streak_ = 0;
  bool global_halted_ = false;
  consensus::GlobalSync sync_;
  std::uint64_t arrived_total_ = 0;
  RunResult result_;
};

std::vector<NodeRecord> generate_population(const ScenarioConfig& cfg) {
  const Digest digest(cfg.digest);
  Rng rng = Rng::stream(cfg.seed, 1);
  const std::uint64_t t = cfg.adversary_total();
  const std::uint64_t honest = cfg.n - t;

  std::vector<NodeRecord> pop;
  pop.reserve(cfg.n);
  std::vector<ColourCode> honest_colours;
  for (std::uint64_t i = 0; i < honest; ++i) {
    NodeRecord r;
    r.id = make_id(digest, cfg.seed, i);
    r.colour = ColourCode(static_cast<std::uint32_t>(rng.below(ColourCode::kLimit)));
    honest_colours.push_back(r.colour);
    pop.push_back(r);
  }

  const std::size_t s0 = cfg.initial_shards;
  const std::size_t m0 = cfg.n / s0;
  std::size_t T0 = m0 / 2 + 1;
  if (cfg.initial_threshold) {
    T0 = *cfg.initial_threshold;
  } else if (auto T = cfg.threshold.threshold(m0, s0)) {
    T0 = *T;
  }
  const auto colours = adversary_report_colours(cfg.strategy, honest_colours, s0, m0, T0, t, rng);
  for (std::uint64_t i = 0; i < t; ++i) {
    NodeRecord r;
    r.id = make_id(digest, cfg.seed, honest + i);
    r.colour = colours[i];
    r.is_adversary = true;
    pop.push_back(r);
  }
  return pop;
}

}  // namespace

RunResult run(const ScenarioConfig& config, const RunHooks& hooks) {
  config.validate();
  return run(config, generate_population(config), hooks);
}

RunResult run(const ScenarioConfig& config, std::vector<NodeRecord> population, const RunHooks& hooks) {
  config.validate();
  if (population.empty()) throw InfeasibleScenario("empty population");
  for (auto& r : population) {
    r.reported_at = 0;
    r.pending_since = 0;
  }
  Engine engine(config, std::move(population), hooks);
  return engine.run();
}

std::uint64_t measure_halt_threshold(std::uint64_t n, std::uint64_t s, const AdversaryStrategy& strategy,
                                     std::optional<std::uint64_t> forced_T, const ScenarioConfig& base) {
  ScenarioConfig cfg = base;
  cfg.n = n;
  cfg.adversary_fraction = 0.0;
  cfg.strategy = strategy;
  cfg.initial_shards = s;
  cfg.initial_threshold = forced_T;
  cfg.scaling = false;
  cfg.recovery = false;
  cfg.stop_on_global_halt = false;
  cfg.churn_prob = 0.0;
  cfg.iterations = std::max<std::uint64_t>(24, 4 * (cfg.halt_rounds + cfg.global_window));

  // A probe counts only if no block ever finalizes: a run of withholding
  // leaders can stall a shard below the structural count, but not for the
  // whole window.
  auto halts = [&](std::uint64_t a) {
    cfg.adversary_count = a;
    const auto r = run(cfg).summary;
    return r.global_halts > 0 && r.finalized_blocks == 0;
  };
  if (!halts(n)) throw InfeasibleScenario("even a fully adversarial population does not halt");
  std::uint64_t lo = 0;  // does not halt
  std::uint64_t hi = n;  // halts
  if (halts(0)) return 0;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (halts(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace shardsim::sim
