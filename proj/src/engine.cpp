#include "leofuzz/engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace leofuzz {

using nlohmann::json;

void SeedQueue::append(SeedPtr s) {
  std::lock_guard<std::mutex> lk(mu_);
  items_.push_back(std::move(s));
}

SeedPtr SeedQueue::get_next() {
  std::lock_guard<std::mutex> lk(mu_);
  if (items_.empty()) return nullptr;
  if (cursor_ >= items_.size()) cursor_ = 0;
  return items_[cursor_++];
}

std::size_t SeedQueue::size() const {
  std::lock_guard<std::mutex> lk(mu_);
  return items_.size();
}

std::vector<SeedPtr> SeedQueue::snapshot() const {
  std::lock_guard<std::mutex> lk(mu_);
  return items_;
}

bool CrashStore::add(CrashEntry e) {
  ++total;
  if (!blocks_seen.insert(e.block).second) return false;
  entries.push_back(std::move(e));
  return true;
}

std::size_t CampaignStats::targets_reached() const {
  std::size_t n = 0;
  for (const auto& t : targets)
    if (t.reached) ++n;
  return n;
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Mes: return "mes";
    case Strategy::AflgoDistance: return "aflgo_distance";
    case Strategy::SeqcovSingle: return "seqcov_single";
  }
  return "?";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
  if (name == "mes") return Strategy::Mes;
  if (name == "aflgo_distance" || name == "aflgo") return Strategy::AflgoDistance;
  if (name == "seqcov_single" || name == "seqcov") return Strategy::SeqcovSingle;
  return std::nullopt;
}

namespace {

namespace fs = std::filesystem;

std::string padded_id(std::uint64_t id) {
  std::ostringstream os;
  os << std::setw(6) << std::setfill('0') << id;
  return os.str();
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

void write_file(const fs::path& p, const Bytes& data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

struct ExecOutcome {
  bool ran = false;
  bool crashed = false;
  InputClass cls = InputClass::Neither;
};

class Campaign {
 public:
  Campaign(const SimProgram& prog, std::vector<TargetSequence> seqs,
           const std::vector<Bytes>& initial, const CampaignConfig& cfg)
      : prog_(prog), cfg_(cfg), initial_(initial), result_{} {
    if (seqs.empty()) throw Error("run_campaign: no target sequences");
    if (prog_.instrumented.size() != prog_.block_ids.size())
      throw Error("run_campaign: program instrumentation not prepared for the sequences");
    if (initial_.empty()) throw Error("run_campaign: at least one initial seed is required");
    result_.sequences = std::move(seqs);

    if (cfg_.sched.t_x <= 0.0) {
      const double span = cfg_.time_budget_s > 0.0
                              ? cfg_.time_budget_s
                              : static_cast<double>(cfg_.exec_budget) / cfg_.virtual_exec_rate;
      cfg_.sched.t_x = span > 0.0 ? 0.5 * span : 1.0;
    }
    cfg_.sched.validate();

    for (auto& ts : result_.sequences) {
      std::vector<std::uint32_t> ids;
      ids.reserve(ts.blocks.size());
      for (const auto& b : ts.blocks) ids.push_back(prog_.index_of(b));
      seq_blocks_.push_back(std::move(ids));
      target_block_.push_back(prog_.index_of(ts.target.resolved_block));
      targets_.push_back(ts.target);
    }
    stats_.targets.resize(result_.sequences.size());
    edge_seen_.assign(prog_.edge_pairs.size(), 0);

    if (cfg_.strategy == Strategy::AflgoDistance) {
      auto dists = harmonic_node_distances(prog_.graphs, targets_);
      dist_by_block_.assign(prog_.block_ids.size(),
                            std::numeric_limits<double>::quiet_NaN());
      for (std::uint32_t i = 0; i < prog_.block_ids.size(); ++i) {
        auto it = dists.find(prog_.block_ids[i]);
        if (it != dists.end()) dist_by_block_[i] = it->second;
      }
    }

    rng_.seed(cfg_.rng_seed);
    stage_ = make_stage_state(cfg_.stage, 0.0);
    wall_start_ = std::chrono::steady_clock::now();

    if (!cfg_.out_dir.empty()) {
      io_ = true;
      out_dir_ = cfg_.out_dir;
      fs::create_directories(fs::path(out_dir_) / "queue_cov");
      fs::create_directories(fs::path(out_dir_) / "queue_dir");
      fs::create_directories(fs::path(out_dir_) / "crashes");
      stats_out_.open(fs::path(out_dir_) / "stats.jsonl", std::ios::trunc);
      if (!stats_out_) throw Error("cannot write " + out_dir_ + "/stats.jsonl");
    }
  }

  CampaignResult run() {
    log_event({{"event", "campaign_start"},
               {"strategy", strategy_name(cfg_.strategy)},
               {"rng_seed", cfg_.rng_seed},
               {"exec_budget", cfg_.exec_budget},
               {"time_budget_s", cfg_.time_budget_s},
               {"targets", result_.sequences.size()},
               {"deterministic", cfg_.deterministic}});
    seed_corpus();
    if (cfg_.concolic && !cfg_.deterministic && cfg_.concolic_threaded) start_worker();

    std::uint64_t iter = 0;
    while (!terminated()) {
      const StageEvent ev = stage_coord(stage_, now_s());
      if (ev != StageEvent::None) {
        ++stats_.stage_transitions;
        log_event({{"event", "stage"},
                   {"sof", stage_.sof},
                   {"epoch", stage_.epoch},
                   {"rate", stage_.rate},
                   {"execs", stats_.executions},
                   {"t", now_s()}});
      }
      SeedQueue* q = stage_.sof == 0 ? &cq_ : &dq_;
      if (q->empty()) {
        SeedQueue* other = q == &cq_ ? &dq_ : &cq_;
        if (other->empty())
          throw Error("run_campaign: both queues empty after seeding");
        ++stats_.queue_fallbacks;
        log_event({{"event", "queue_fallback"},
                   {"wanted", stage_.sof == 0 ? "cq" : "dq"},
                   {"execs", stats_.executions}});
        q = other;
      }
      SeedPtr s = q->get_next();
      const long energy = decide_energy(*s);
      ++stats_.selections;
      if (cfg_.on_select) cfg_.on_select(*s, energy);
      for (long k = 0; k < energy && !terminated(); ++k)
        run_input(mutate(s->bytes, rng_, cfg_.mutation), SeedOrigin::Fuzzer);

      ++iter;
      if (cfg_.concolic && worker_.joinable())
        drain_inbox();
      else if (cfg_.concolic && cfg_.concolic_interval > 0 &&
               iter % static_cast<std::uint64_t>(cfg_.concolic_interval) == 0)
        concolic_step();
    }

    stop_worker();
    log_event({{"event", "end"},
               {"execs", stats_.executions},
               {"targets_reached", stats_.targets_reached()},
               {"all_targets_at",
                stats_.all_targets_at ? json(*stats_.all_targets_at) : json(nullptr)},
               {"crash_unique", stats_.crash_unique},
               {"crash_total", stats_.crash_total},
               {"cq", cq_.size()},
               {"dq", dq_.size()},
               {"discards", stats_.discards},
               {"stage_transitions", stats_.stage_transitions},
               {"t", now_s()}});
    result_.stats = std::move(stats_);
    result_.crashes = std::move(crashes_);
    result_.stage = stage_;
    result_.cq_items = cq_.snapshot();
    result_.dq_items = dq_.snapshot();
    return std::move(result_);
  }

 private:
  double now_s() const {
    if (cfg_.deterministic)
      return static_cast<double>(stats_.executions) / cfg_.virtual_exec_rate;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start_)
        .count();
  }

  bool all_targets_reached() const {
    return stats_.targets_reached() == stats_.targets.size();
  }

  bool terminated() const {
    if (stop_) return true;
    if (stats_.executions >= cfg_.exec_budget) return true;
    if (cfg_.time_budget_s > 0.0 && now_s() >= cfg_.time_budget_s) return true;
    return false;
  }

  void log_event(json j) {
    if (!io_) return;
    stats_out_ << j.dump() << '\n';
    stats_out_.flush();
  }

  SeedCoverage coverage_of(const std::vector<std::uint32_t>& filtered) const {
    SeedCoverage cov;
    cov.per_sequence.reserve(seq_blocks_.size());
    for (std::size_t i = 0; i < seq_blocks_.size(); ++i)
      cov.per_sequence.push_back(
          static_cast<double>(lcs_length_u32(filtered, seq_blocks_[i])) /
          static_cast<double>(seq_blocks_[i].size()));
    cov.ots_index = 0;
    for (std::size_t i = 1; i < cov.per_sequence.size(); ++i)
      if (cov.per_sequence[i] > cov.per_sequence[cov.ots_index]) cov.ots_index = i;
    return cov;
  }

  bool has_new_edge(const std::vector<std::uint32_t>& edge_ids) const {
    for (std::uint32_t e : edge_ids)
      if (!edge_seen_[e]) return true;
    return false;
  }

  void absorb_coverage(const SeedCoverage& cov, const std::vector<std::uint32_t>& edge_ids) {
    for (std::size_t i = 0; i < cov.per_sequence.size(); ++i)
      update_gmaxcov(result_.sequences[i], cov.per_sequence[i]);
    for (std::uint32_t e : edge_ids) edge_seen_[e] = 1;
  }

  void note_target_hits() {
    if (all_targets_reached()) return;
    const double t = now_s();
    for (std::size_t i = 0; i < target_block_.size(); ++i) {
      if (stats_.targets[i].reached) continue;
      for (std::uint32_t b : raw_.raw_blocks) {
        if (b == target_block_[i]) {
          stats_.targets[i] = {true, stats_.executions, t};
          const auto& loc = result_.sequences[i].target.location;
          log_event({{"event", "target_reached"},
                     {"target", loc.file + ":" + std::to_string(loc.line)},
                     {"block", result_.sequences[i].target.resolved_block},
                     {"execs", stats_.executions},
                     {"t", t}});
          break;
        }
      }
    }
    if (all_targets_reached() && !stats_.all_targets_at) {
      stats_.all_targets_at = stats_.executions;
      if (cfg_.stop_on_all_targets) stop_ = true;
    }
  }

  SeedPtr make_seed(Bytes bytes, SeedCoverage cov, SeedOrigin origin) {
    auto s = std::make_shared<Seed>();
    s->id = next_seed_id_++;
    s->bytes = std::move(bytes);
    s->trace_blocks = raw_.filtered;
    s->edge_ids = raw_.edge_ids;
    s->cov = std::move(cov);
    s->origin = origin;
    if (!dist_by_block_.empty()) {
      double sum = 0.0;
      std::size_t defined = 0;
      for (std::uint32_t b : raw_.raw_blocks) {
        if (!std::isnan(dist_by_block_[b])) {
          sum += dist_by_block_[b];
          ++defined;
        }
      }
      if (defined > 0) {
        s->distance = sum / static_cast<double>(defined);
        env_min_ = std::min(env_min_, s->distance);
        env_max_ = std::max(env_max_, s->distance);
      }
    }
    return s;
  }

  void enqueue(SeedPtr s, bool directed) {
    if (directed) {
      ++stats_.dq_adds;
      if (io_)
        write_file(fs::path(out_dir_) / "queue_dir" / ("id_" + padded_id(s->id)), s->bytes);
      dq_.append(std::move(s));
    } else {
      ++stats_.cq_adds;
      if (io_)
        write_file(fs::path(out_dir_) / "queue_cov" / ("id_" + padded_id(s->id)), s->bytes);
      cq_.append(std::move(s));
    }
  }

  // One execution through the exercise/classify/route pipeline. The crash
  // branch precedes classification; crashing inputs never join a queue but
  // still contribute gMaxCov and edge coverage.
  ExecOutcome run_input(const Bytes& bytes, SeedOrigin origin) {
    ExecOutcome out;
    if (terminated()) return out;
    execute_into(prog_, bytes, raw_);
    ++stats_.executions;
    out.ran = true;

    note_target_hits();
    SeedCoverage cov = coverage_of(raw_.filtered);

    if (raw_.crashed_at) {
      out.crashed = true;
      ++stats_.crash_total;
      CrashEntry e;
      e.input_id = stats_.executions;
      e.bytes = bytes;
      e.block = prog_.block_ids[*raw_.crashed_at];
      e.exec_index = stats_.executions;
      e.time_s = now_s();
      if (crashes_.add(std::move(e))) {
        ++stats_.crash_unique;
        const CrashEntry& stored = crashes_.entries.back();
        if (io_)
          write_file(fs::path(out_dir_) / "crashes" /
                         ("id_" + padded_id(crashes_.entries.size()) + "_" +
                          sanitize(stored.block)),
                     stored.bytes);
        log_event({{"event", "crash"},
                   {"block", stored.block},
                   {"execs", stats_.executions},
                   {"t", stored.time_s}});
      }
      absorb_coverage(cov, raw_.edge_ids);
    } else {
      bool directed = false;
      for (std::size_t i = 0; i < cov.per_sequence.size(); ++i)
        if (cov.per_sequence[i] > result_.sequences[i].g_max_cov) {
          directed = true;
          break;
        }
      if (directed)
        out.cls = InputClass::Directed;
      else if (has_new_edge(raw_.edge_ids))
        out.cls = InputClass::CoverageOnly;
      else
        out.cls = InputClass::Neither;

      if (out.cls == InputClass::Directed) {
        enqueue(make_seed(bytes, cov, origin), true);
      } else if (out.cls == InputClass::CoverageOnly) {
        enqueue(make_seed(bytes, cov, origin), false);
      } else if (origin == SeedOrigin::Initial) {
        enqueue(make_seed(bytes, cov, origin), false);  // initial seeds always enter
        ++stage_.csc;                                   // csc mirrors the CQ size
      } else {
        ++stats_.discards;
      }
      absorb_coverage(cov, raw_.edge_ids);
      record_execution_outcome(stage_, out.cls);
    }

    if (stats_.executions % 10000 == 0)
      log_event({{"event", "milestone"},
                 {"execs", stats_.executions},
                 {"targets_reached", stats_.targets_reached()},
                 {"crash_unique", stats_.crash_unique},
                 {"rate", stage_.rate},
                 {"sof", stage_.sof}});
    return out;
  }

  void seed_corpus() {
    for (const auto& bytes : initial_) {
      if (terminated()) break;
      run_input(bytes, SeedOrigin::Initial);
    }
    if (cq_.empty() && dq_.empty() && !initial_.empty() && stats_.executions > 0) {
      // Every initial seed crashed; keep one in CQ so the loop has material.
      execute_into(prog_, initial_.front(), raw_);
      enqueue(make_seed(initial_.front(), coverage_of(raw_.filtered), SeedOrigin::Initial),
              false);
      ++stage_.csc;
    }
  }

  long decide_energy(const Seed& s) {
    const double el = now_s();
    switch (cfg_.strategy) {
      case Strategy::Mes:
        // Cap interpolates between a flat schedule (T = 1) and pure fitness
        // (T = 0); the exponential in menergy does the concentration.
        return assign_energy(s.cov, result_.sequences, el, cfg_.sched).menergy;
      case Strategy::AflgoDistance: {
        const double temp = temperature(el, cfg_.sched.t_x);
        double dn = 1.0;  // undefined distance schedules as farthest
        if (!std::isnan(s.distance))
          dn = env_max_ > env_min_ ? (s.distance - env_min_) / (env_max_ - env_min_) : 0.0;
        return menergy(cfg_.sched.base_energy, (1.0 - dn) * (1.0 - temp) + 0.5 * temp);
      }
      case Strategy::SeqcovSingle:
        return menergy(cfg_.sched.base_energy, s.cov.ots_cov());
    }
    return cfg_.sched.base_energy;
  }

  SeedPtr next_unprocessed(SeedQueue& q) {
    for (const auto& s : q.snapshot())
      if (!s->concolic_done) return s;
    return nullptr;
  }

  std::vector<Bytes> solve_frontier(const Bytes& seed_bytes, RawExecResult& scratch) {
    execute_into(prog_, seed_bytes, scratch);
    std::set<std::uint32_t> traversed(scratch.edge_ids.begin(), scratch.edge_ids.end());
    std::set<std::uint32_t> visited;
    std::vector<Bytes> out;
    for (std::uint32_t u : scratch.raw_blocks) {
      if (!visited.insert(u).second) continue;
      for (const auto& oe : prog_.succ[u]) {
        if (!oe.has_pred || traversed.count(oe.edge_id)) continue;
        auto cand = solve_branch(prog_, seed_bytes, prog_.block_ids[u], prog_.block_ids[oe.to]);
        if (cand && *cand != seed_bytes) {
          out.push_back(std::move(*cand));
          if (out.size() >= static_cast<std::size_t>(cfg_.concolic_max_solves)) return out;
        }
      }
    }
    return out;
  }

  void concolic_step() {
    SeedPtr s = next_unprocessed(dq_);
    if (!s) s = next_unprocessed(cq_);
    if (!s) return;
    s->concolic_done = true;
    RawExecResult scratch;
    for (auto& cand : solve_frontier(s->bytes, scratch)) {
      if (terminated()) break;
      ++stats_.concolic_candidates;
      run_input(cand, SeedOrigin::Concolic);
    }
  }

  void start_worker() {
    worker_stop_.store(false);
    worker_ = std::thread([this] {
      std::set<std::uint64_t> done;
      RawExecResult scratch;
      while (!worker_stop_.load()) {
        SeedPtr next;
        for (const auto& s : dq_.snapshot())
          if (!done.count(s->id)) {
            next = s;
            break;
          }
        if (!next)
          for (const auto& s : cq_.snapshot())
            if (!done.count(s->id)) {
              next = s;
              break;
            }
        if (!next) {
          std::this_thread::sleep_for(std::chrono::milliseconds(1));
          continue;
        }
        done.insert(next->id);
        auto cands = solve_frontier(next->bytes, scratch);
        if (!cands.empty()) {
          std::lock_guard<std::mutex> lk(inbox_mu_);
          for (auto& c : cands) inbox_.push_back(std::move(c));
        }
      }
    });
  }

  void drain_inbox() {
    std::vector<Bytes> batch;
    {
      std::lock_guard<std::mutex> lk(inbox_mu_);
      batch.swap(inbox_);
    }
    for (auto& cand : batch) {
      if (terminated()) break;
      ++stats_.concolic_candidates;
      run_input(cand, SeedOrigin::Concolic);
    }
  }

  void stop_worker() {
    if (worker_.joinable()) {
      worker_stop_.store(true);
      worker_.join();
    }
  }

  const SimProgram& prog_;
  CampaignConfig cfg_;
  const std::vector<Bytes>& initial_;
  CampaignResult result_;
  std::vector<std::vector<std::uint32_t>> seq_blocks_;
  std::vector<std::uint32_t> target_block_;
  std::vector<Target> targets_;
  std::vector<char> edge_seen_;
  StageState stage_;
  CampaignStats stats_;
  CrashStore crashes_;
  SeedQueue cq_, dq_;
  std::mt19937_64 rng_;
  RawExecResult raw_;
  std::uint64_t next_seed_id_ = 1;
  std::vector<double> dist_by_block_;
  double env_min_ = std::numeric_limits<double>::infinity();
  double env_max_ = -std::numeric_limits<double>::infinity();
  std::chrono::steady_clock::time_point wall_start_;
  std::ofstream stats_out_;
  bool io_ = false;
  std::string out_dir_;
  bool stop_ = false;
  std::thread worker_;
  std::atomic<bool> worker_stop_{false};
  std::mutex inbox_mu_;
  std::vector<Bytes> inbox_;
};

}  // namespace

CampaignResult run_campaign(const SimProgram& prog, std::vector<TargetSequence> seqs,
                            const std::vector<Bytes>& initial_seeds,
                            const CampaignConfig& cfg) {
  Campaign c(prog, std::move(seqs), initial_seeds, cfg);
  return c.run();
}

}  // namespace leofuzz
