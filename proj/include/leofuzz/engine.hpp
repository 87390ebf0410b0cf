#pragma once
// Campaign driver: seed queues, routing, energy dispatch per strategy, stage
// coordination, stats/corpus emission, and the concolic worker hookup.

#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <random>

#include "leofuzz/mutate.hpp"
#include "leofuzz/scheduler.hpp"
#include "leofuzz/simprog.hpp"
#include "leofuzz/stagecoord.hpp"

namespace leofuzz {

enum class SeedOrigin { Initial, Fuzzer, Concolic };

struct Seed {
  std::uint64_t id = 0;
  Bytes bytes;
  std::vector<std::uint32_t> trace_blocks;  // filtered trace, dense indices
  std::vector<std::uint32_t> edge_ids;      // sorted unique
  SeedCoverage cov;
  SeedOrigin origin = SeedOrigin::Fuzzer;
  double distance = std::numeric_limits<double>::quiet_NaN();
  bool concolic_done = false;
};

using SeedPtr = std::shared_ptr<Seed>;

// Cyclic queue; seeds are never evicted. Append is safe against a concurrent
// snapshot, matching the threaded concolic producer/consumer split.
class SeedQueue {
 public:
  void append(SeedPtr s);
  SeedPtr get_next();              // nullptr when empty; cursor wraps
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<SeedPtr> snapshot() const;

 private:
  mutable std::mutex mu_;
  std::vector<SeedPtr> items_;
  std::size_t cursor_ = 0;
};

struct CrashEntry {
  std::uint64_t input_id = 0;
  Bytes bytes;
  BlockId block;
  std::uint64_t exec_index = 0;
  double time_s = 0.0;
};

// Deduplicates by crash block; the first input per block wins.
struct CrashStore {
  std::vector<CrashEntry> entries;
  std::set<BlockId> blocks_seen;
  std::uint64_t total = 0;

  bool add(CrashEntry e);
};

struct TargetStat {
  bool reached = false;
  std::uint64_t exec_index = 0;
  double time_s = 0.0;
};

struct CampaignStats {
  std::uint64_t executions = 0;
  std::uint64_t cq_adds = 0;
  std::uint64_t dq_adds = 0;
  std::uint64_t discards = 0;
  std::uint64_t crash_total = 0;
  std::uint64_t crash_unique = 0;
  std::uint64_t selections = 0;
  std::uint64_t stage_transitions = 0;
  std::uint64_t queue_fallbacks = 0;
  std::uint64_t concolic_candidates = 0;
  std::vector<TargetStat> targets;
  std::optional<std::uint64_t> all_targets_at;  // execution index

  std::size_t targets_reached() const;
};

enum class Strategy { Mes, AflgoDistance, SeqcovSingle };

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& name);

struct CampaignConfig {
  SchedulerConfig sched;
  StageConfig stage;
  Strategy strategy = Strategy::Mes;
  std::uint64_t exec_budget = 1'000'000;
  double time_budget_s = 0.0;  // 0 = no time budget
  bool stop_on_all_targets = true;
  bool deterministic = true;
  double virtual_exec_rate = 1000.0;  // virtual clock: executions per second
  std::uint64_t rng_seed = 1;
  bool concolic = false;
  bool concolic_threaded = false;  // ignored in deterministic mode
  int concolic_interval = 8;       // engine iterations between worker steps
  int concolic_max_solves = 4;
  MutationPolicy mutation;
  std::string out_dir;  // empty: keep corpus/stats in memory only
  // Test hook: observed once per seed selection with the granted energy.
  std::function<void(const Seed&, long)> on_select;
};

struct CampaignResult {
  CampaignStats stats;
  CrashStore crashes;
  StageState stage;
  std::vector<TargetSequence> sequences;  // with final g_max_cov values
  std::vector<SeedPtr> cq_items;
  std::vector<SeedPtr> dq_items;
};

// Requires prog.instrumented to be populated (SimProgram::set_instrumented
// with the same sequences). `seqs` carries priorities from generation;
// g_max_cov starts at 0.
CampaignResult run_campaign(const SimProgram& prog,
                            std::vector<TargetSequence> seqs,
                            const std::vector<Bytes>& initial_seeds,
                            const CampaignConfig& cfg);

}  // namespace leofuzz
