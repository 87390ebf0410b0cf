#include "leofuzz/bench.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace leofuzz {

using nlohmann::json;

double vargha_delaney_a12(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw Error("vargha_delaney_a12: empty sample");
  double wins = 0.0;
  for (double x : xs)
    for (double y : ys) {
      if (x < y)
        wins += 1.0;
      else if (x == y)
        wins += 0.5;
    }
  return wins / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

template <typename T>
double median(std::vector<T> v) {
  if (v.empty()) throw Error("median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return static_cast<double>(v[n / 2]);
  return 0.5 * (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2]));
}

template double median<double>(std::vector<double>);
template double median<std::uint64_t>(std::vector<std::uint64_t>);

double BenchCell::median_execs_to_all() const {
  std::vector<std::uint64_t> v;
  v.reserve(runs.size());
  for (const auto& r : runs) v.push_back(r.execs_to_all);
  return median(std::move(v));
}

std::size_t BenchCell::median_targets_reached() const {
  std::vector<std::uint64_t> v;
  v.reserve(runs.size());
  for (const auto& r : runs) v.push_back(r.targets_reached);
  return static_cast<std::size_t>(median(std::move(v)));
}

int BenchCell::all_reached_count() const {
  int n = 0;
  for (const auto& r : runs) n += r.all_reached ? 1 : 0;
  return n;
}

const BenchCell* BenchReport::find(const std::string& fixture, Strategy s) const {
  for (const auto& c : cells)
    if (c.fixture == fixture && c.strategy == s) return &c;
  return nullptr;
}

double BenchReport::a12(const std::string& fixture, Strategy s, Strategy baseline) const {
  const BenchCell* a = find(fixture, s);
  const BenchCell* b = find(fixture, baseline);
  if (!a || !b) throw Error("a12: missing bench cell for fixture " + fixture);
  auto pull = [](const BenchCell& c) {
    std::vector<double> v;
    v.reserve(c.runs.size());
    for (const auto& r : c.runs) v.push_back(static_cast<double>(r.execs_to_all));
    return v;
  };
  const auto xs = pull(*a);
  const auto ys = pull(*b);
  return vargha_delaney_a12(xs, ys);
}

std::string BenchReport::format_table() const {
  std::ostringstream os;
  os << std::left << std::setw(12) << "fixture" << std::setw(16) << "strategy"
     << std::right << std::setw(8) << "runs" << std::setw(10) << "all" << std::setw(16)
     << "med execs" << std::setw(14) << "med targets" << '\n';
  os << std::string(76, '-') << '\n';
  for (const auto& c : cells) {
    os << std::left << std::setw(12) << c.fixture << std::setw(16)
       << strategy_name(c.strategy) << std::right << std::setw(8) << c.runs.size()
       << std::setw(7) << c.all_reached_count() << "/" << std::left << std::setw(2)
       << c.runs.size() << std::right << std::setw(16) << std::fixed
       << std::setprecision(1) << c.median_execs_to_all() << std::setw(14)
       << c.median_targets_reached() << '\n';
  }
  for (const auto& c : cells) {
    if (c.strategy == Strategy::Mes) continue;
    if (!find(c.fixture, Strategy::Mes)) continue;
    os << "A12(mes vs " << strategy_name(c.strategy) << ", " << c.fixture
       << ", execs-to-all, lower better) = " << std::fixed << std::setprecision(3)
       << a12(c.fixture, Strategy::Mes, c.strategy) << '\n';
  }
  return os.str();
}

std::string BenchReport::to_json() const {
  json cells_j = json::array();
  for (const auto& c : cells) {
    json runs_j = json::array();
    for (const auto& r : c.runs)
      runs_j.push_back({{"run", r.run},
                        {"executions", r.executions},
                        {"execs_to_all", r.execs_to_all},
                        {"all_reached", r.all_reached},
                        {"targets_reached", r.targets_reached},
                        {"unique_crashes", r.unique_crashes}});
    cells_j.push_back({{"fixture", c.fixture},
                       {"strategy", strategy_name(c.strategy)},
                       {"runs", std::move(runs_j)},
                       {"median_execs_to_all", c.median_execs_to_all()},
                       {"median_targets_reached", c.median_targets_reached()},
                       {"all_reached_count", c.all_reached_count()}});
  }
  json a12_j = json::array();
  for (const auto& c : cells) {
    if (c.strategy == Strategy::Mes) continue;
    if (!find(c.fixture, Strategy::Mes)) continue;
    a12_j.push_back({{"fixture", c.fixture},
                     {"strategy", strategy_name(Strategy::Mes)},
                     {"baseline", strategy_name(c.strategy)},
                     {"metric", "execs_to_all"},
                     {"a12", a12(c.fixture, Strategy::Mes, c.strategy)}});
  }
  return json{{"cells", std::move(cells_j)}, {"a12", std::move(a12_j)}}.dump(2);
}

namespace {

BenchRun one_run(const SimProgram& prog, const std::vector<TargetSequence>& seqs,
                 const BenchFixture& fx, const BenchConfig& cfg, Strategy strat,
                 int run_idx) {
  CampaignConfig cc = cfg.base;
  cc.strategy = strat;
  cc.rng_seed = cfg.rng_seed + static_cast<std::uint64_t>(run_idx);
  cc.out_dir.clear();
  cc.on_select = nullptr;
  CampaignResult res = run_campaign(prog, seqs, fx.seeds, cc);
  BenchRun r;
  r.run = run_idx;
  r.executions = res.stats.executions;
  r.all_reached = res.stats.all_targets_at.has_value();
  r.execs_to_all = r.all_reached ? *res.stats.all_targets_at : cc.exec_budget;
  r.targets_reached = res.stats.targets_reached();
  r.unique_crashes = res.stats.crash_unique;
  return r;
}

}  // namespace

BenchReport run_bench(std::span<const BenchFixture> fixtures, const BenchConfig& cfg) {
  if (cfg.runs < 1) throw Error("run_bench: runs must be >= 1");
  BenchReport report;
  for (const auto& fx : fixtures) {
    SimProgram prog = load_program_file(fx.program_path);
    auto targets = resolve_targets(prog.graphs, parse_targets_path(fx.targets_path));
    auto seqs = generate_sequences(prog.graphs, targets, cfg.base.sched.epsilon);
    prog.set_instrumented(seqs);
    for (Strategy strat : cfg.strategies) {
      BenchCell cell;
      cell.fixture = fx.name;
      cell.strategy = strat;
      cell.runs.resize(static_cast<std::size_t>(cfg.runs));
      if (cfg.jobs > 1) {
        std::atomic<int> next{0};
        const int nthreads = std::min(cfg.jobs, cfg.runs);
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t)
          pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < cfg.runs; i = next.fetch_add(1))
              cell.runs[static_cast<std::size_t>(i)] =
                  one_run(prog, seqs, fx, cfg, strat, i);
          });
        for (auto& th : pool) th.join();
      } else {
        for (int i = 0; i < cfg.runs; ++i)
          cell.runs[static_cast<std::size_t>(i)] = one_run(prog, seqs, fx, cfg, strat, i);
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace leofuzz
