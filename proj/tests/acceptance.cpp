// Acceptance gate: eight standalone end-to-end checks, one PASS line each.
// Usage: acceptance <c1..c8|all>. Exits 1 on the first violated requirement.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leofuzz/bench.hpp"
#include "leofuzz/cli.hpp"
#include "support/oracles.hpp"

using namespace leofuzz;
namespace fs = std::filesystem;
using nlohmann::json;

#define REQUIRE(cond, msg)                                                        \
  do {                                                                            \
    if (!(cond)) {                                                                \
      std::ostringstream os_;                                                     \
      os_ << msg;                                                                 \
      std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, os_.str().c_str());     \
      std::exit(1);                                                               \
    }                                                                             \
  } while (0)

namespace {

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fixture(const char* name) {
  return std::string(LEOFUZZ_FIXTURE_DIR) + "/" + name;
}

std::vector<BlockId> raw_trace(const SimProgram& prog, const Bytes& input) {
  RawExecResult raw;
  execute_into(prog, input, raw);
  std::vector<BlockId> out;
  for (std::uint32_t b : raw.raw_blocks) out.push_back(prog.block_ids[b]);
  return out;
}

TargetSequence make_ts(std::vector<BlockId> blocks) {
  TargetSequence ts;
  ts.blocks = std::move(blocks);
  ts.target.resolved_block = ts.blocks.back();
  return ts;
}

fs::path scratch_dir(const char* tag) {
  fs::path p = fs::temp_directory_path() /
               (std::string("leofuzz_accept_") + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good(), "cannot read " << p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> dir_names(const fs::path& dir) {
  std::vector<std::string> names;
  if (fs::is_directory(dir))
    for (const auto& de : fs::directory_iterator(dir)) names.push_back(de.path().filename());
  std::sort(names.begin(), names.end());
  return names;
}

// ---------------------------------------------------------------------------
// c1: the running example end to end: distance labels, the interprocedural
// sequence, and the sequence-coverage walkthrough numbers.

void c1() {
  Timer timer;

  SimProgram prog = load_program_file(fixture("fig1.json"));
  auto targets = resolve_targets(prog.graphs, parse_targets_path(fixture("fig1_targets.txt")));
  auto nd = harmonic_node_distances(prog.graphs, targets);
  REQUIRE(near(nd.at("a"), 40.0 / 9.0, 1e-12), "d(a) = " << nd.at("a") << " want 40/9");

  const double s1 = harmonic_seed_distance(raw_trace(prog, {'M', 'Z', 'E', 'I', 0, 0}), nd);
  const double s2 = harmonic_seed_distance(raw_trace(prog, {'z', 'z', 'z', 'z', 'z', 'z'}), nd);
  const double s3 = harmonic_seed_distance(raw_trace(prog, {'z', 0x3F, 'z', 'z', 'z', 'z'}), nd);
  REQUIRE(near(s1, 2.89, 0.01), "seed distance 1 = " << s1 << " want 2.89 +- 0.01");
  REQUIRE(near(s2, 2.61, 0.01), "seed distance 2 = " << s2 << " want 2.61 +- 0.01");
  REQUIRE(near(s3, 2.78, 0.01), "seed distance 3 = " << s3 << " want 2.78 +- 0.01");

  ProgramGraphs pg3 = parse_graphs_file(fixture("fig3.json"));
  auto t3 = resolve_targets(pg3, parse_targets_path(fixture("fig3_targets.txt")));
  auto seq3 = generate_sequences(pg3, t3, 0.5);
  REQUIRE(seq3.size() == 1, "fig3 expects one sequence");
  const std::vector<BlockId> want3{"main1", "A1", "entry", "a", "f", "g"};
  REQUIRE(seq3[0].blocks == want3, "fig3 sequence mismatch");

  std::vector<TargetSequence> trio;
  trio.push_back(make_ts({"a", "b", "c", "d", "f", "g"}));
  trio.push_back(make_ts({"a", "b", "c", "g", "h"}));
  trio.push_back(make_ts({"a", "g", "i", "k"}));
  ExecutionTrace et;
  et.blocks = {"a", "b", "c", "g", "k", "m", "d"};
  const double cov2 = seq_cov(et, trio[1]);
  REQUIRE(cov2 == 0.8, "seq_cov(et, ts2) = " << cov2 << " want exactly 0.8");

  const int p1 = sequence_priority(trio, 0, 0.5);
  const int p2 = sequence_priority(trio, 1, 0.5);
  const int p3 = sequence_priority(trio, 2, 0.5);
  REQUIRE(p1 == 1 && p3 == 0, "priorities (ts1, ts3) = (" << p1 << ", " << p3
                                                          << ") want (1, 0)");

  TargetSequence g = trio[1];
  for (double c : {0.3, 0.5, 0.4}) update_gmaxcov(g, c);
  REQUIRE(g.g_max_cov == 0.5, "gmax after 0.3/0.5/0.4 = " << g.g_max_cov);

  const double el = timer.s();
  REQUIRE(el < 1.0, "c1 took " << el << "s, limit 1s");
  std::printf(
      "PASS c1 running example: d(a)=%.9f sd=[%.4f %.4f %.4f] "
      "seq=main1-A1-entry-a-f-g cov=%.2f gmax=%.2f pri=[%d %d %d] (%.2fs)\n",
      nd.at("a"), s1, s2, s3, cov2, g.g_max_cov, p1, p2, p3, el);
}

// ---------------------------------------------------------------------------
// c2: closed-form endpoints of the scheduling formulas.

void c2() {
  Timer timer;

  for (double tx : {0.5, 1.0, 60.0, 3600.0}) {
    REQUIRE(near(temperature(0.0, tx), 1.0, 1e-12), "temperature(0, " << tx << ")");
    REQUIRE(near(temperature(tx, tx), 0.05, 1e-12), "temperature(tx, " << tx << ")");
  }

  for (int i = 0; i < 100; ++i) {
    const double cf = i / 99.0;
    REQUIRE(near(capability(cf, 1.0), 0.5, 1e-12),
            "capability(" << cf << ", 1) = " << capability(cf, 1.0));
  }

  for (long base : {1L, 2L, 3L, 16L, 100L, 4096L})
    REQUIRE(menergy(base, 0.2) == base,
            "menergy(" << base << ", 0.2) = " << menergy(base, 0.2));

  // the fitness form switches exactly when half the sequences pass beta
  const double sc = 0.6, own = 0.55, beta = 0.8;
  const int pr = 2;
  auto half = [&](int n) { return 0.5 * (sc + static_cast<double>(pr) / n); };
  auto third = [&](int n) {
    return (sc + static_cast<double>(pr) / n + (1.0 - own)) / 3.0;
  };
  const std::vector<double> below4{0.9, 0.1, 0.1, 0.1};
  const std::vector<double> at4{0.9, 0.8, 0.1, 0.1};  // 0.8 >= beta counts
  REQUIRE(near(comprehensive_factor(sc, pr, own, below4, 4, beta), half(4), 1e-12),
          "n=4 count=1 should use the two-term form");
  REQUIRE(near(comprehensive_factor(sc, pr, own, at4, 4, beta), third(4), 1e-12),
          "n=4 count=2 should use the three-term form");
  const std::vector<double> below5{0.9, 0.9, 0.1, 0.1, 0.1};
  const std::vector<double> at5{0.9, 0.9, 0.85, 0.1, 0.1};
  REQUIRE(near(comprehensive_factor(sc, pr, own, below5, 5, beta), half(5), 1e-12),
          "n=5 count=2 should use the two-term form");
  REQUIRE(near(comprehensive_factor(sc, pr, own, at5, 5, beta), third(5), 1e-12),
          "n=5 count=3 should use the three-term form");

  const double el = timer.s();
  REQUIRE(el < 1.0, "c2 took " << el << "s, limit 1s");
  std::printf(
      "PASS c2 formula endpoints: temperature, capability, menergy, and the "
      "fitness switchover all within 1e-12 (%.2fs)\n",
      el);
}

// ---------------------------------------------------------------------------
// c3: production algorithms against independent brute-force references.

void c3() {
  Timer timer;
  std::mt19937_64 rng(2024);

  const std::vector<std::string> alphabet{"p", "q", "r", "s"};
  for (int round = 0; round < 1000; ++round) {
    const int k = 1 + static_cast<int>(rng() % 4);
    auto draw = [&](std::size_t len) {
      std::vector<std::string> v;
      for (std::size_t i = 0; i < len; ++i) v.push_back(alphabet[rng() % k]);
      return v;
    };
    const auto a = draw(rng() % 11);
    const auto b = draw(rng() % 11);
    const std::size_t got = lcs_length(a, b);
    const std::size_t want = oracles::lcs_exhaustive(a, b);
    REQUIRE(got == want, "lcs mismatch at round " << round << ": " << got
                                                  << " != " << want);
  }

  for (int round = 0; round < 100; ++round) {
    const int n = 2 + static_cast<int>(rng() % 9);
    Digraph g;
    for (int i = 0; i < n; ++i) g.nodes.push_back("n" + std::to_string(i));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && (rng() % 100) < 30) g.edges.emplace_back(g.nodes[i], g.nodes[j]);
    const DominatorTree dt = compute_dominators(g, "n0");
    for (const auto& node : g.nodes) {
      auto got = dt.dominators_of(node);
      std::sort(got.begin(), got.end());
      const auto want = oracles::dominators_bruteforce(g, "n0", node);
      REQUIRE(got == want, "dominator mismatch on graph " << round << " node " << node);
    }
  }

  const double el = timer.s();
  REQUIRE(el < 30.0, "c3 took " << el << "s, limit 30s");
  std::printf(
      "PASS c3 oracle equivalence: lcs 1000/1000 pairs, dominators 100/100 "
      "graphs (%.2fs)\n",
      el);
}

// ---------------------------------------------------------------------------
// c4: stage coordination: a scripted trace plus the rate direction property.

void c4() {
  Timer timer;

  StageConfig cfg;
  cfg.rate_init = 0.8;
  cfg.gamma = 0.1;
  cfg.delta = 0.5;
  cfg.th_min = 2.0;
  StageState st = make_stage_state(cfg, 0.0);
  REQUIRE(st.sof == 0 && st.dsc == 10 && st.csc == 0 && st.rate == 0.8,
          "fresh state should explore with dsc bootstrapped to 10");

  for (int i = 0; i < 40; ++i) record_execution_outcome(st, InputClass::CoverageOnly);
  REQUIRE(stage_coord(st, 0.5) == StageEvent::None, "40/50 is not above the rate");
  record_execution_outcome(st, InputClass::CoverageOnly);
  REQUIRE(stage_coord(st, 1.0) == StageEvent::ToExploitation, "41/51 crosses 0.8");
  REQUIRE(st.sof == 1 && st.epoch == 1 && st.cdsc == 0 && st.ndc == 0 &&
              st.stage_started_at == 1.0,
          "switch-in bookkeeping");

  record_execution_outcome(st, InputClass::Directed);
  record_execution_outcome(st, InputClass::Directed);
  record_execution_outcome(st, InputClass::Neither);
  record_execution_outcome(st, InputClass::Neither);
  REQUIRE(stage_coord(st, 4.0) == StageEvent::ToExploration,
          "ndc = 2 meets the threshold floor");
  const long double want =
      oracles::rate_reference(0.8L, 2.0L, 3.0L, 1.0L, 0.1L, 0.5L);
  REQUIRE(near(st.rate, static_cast<double>(want), 1e-12),
          "rate after exploitation = " << st.rate << " want " << static_cast<double>(want));
  REQUIRE(st.lndc == 2 && st.slndc == 0, "ndc history shift");

  std::mt19937_64 rng(77);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  for (int round = 0; round < 1000; ++round) {
    StageConfig rc;
    rc.gamma = uniform(1e-6, 0.5);
    rc.delta = uniform(1e-6, 1.0 - 1e-6);
    StageState rs = make_stage_state(rc, 0.0);
    rs.rate = 0.5;
    rs.epoch = 1 + static_cast<long>(rng() % 50);
    rs.stage_started_at = 0.0;
    const double now = uniform(0.5, 1000.0);

    rs.cdsc = 0;
    REQUIRE(update_rate(rs, now) > 0.5,
            "round " << round << ": no directed finds must raise the rate");
    rs.cdsc = 1'000'000'000;
    REQUIRE(update_rate(rs, now) < 0.5,
            "round " << round << ": saturated directed finds must lower the rate");
  }

  const double el = timer.s();
  REQUIRE(el < 5.0, "c4 took " << el << "s, limit 5s");
  std::printf(
      "PASS c4 stage coordination: scripted trace and 1000 rate-direction "
      "parameterizations (%.2fs)\n",
      el);
}

// ---------------------------------------------------------------------------
// c5: byte-identical replays through the installed command line tool.

int run_tool(const std::string& args) {
  const std::string cmd = std::string(LEOFUZZ_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1 && WIFEXITED(rc), "tool did not exit cleanly: " << cmd);
  return WEXITSTATUS(rc);
}

void require_same_dir(const fs::path& a, const fs::path& b) {
  const auto na = dir_names(a);
  const auto nb = dir_names(b);
  REQUIRE(na == nb, a.string() << " and " << b.string() << " hold different files");
  for (const auto& name : na)
    REQUIRE(read_file(a / name) == read_file(b / name),
            "file " << name << " differs between " << a.string() << " and "
                    << b.string());
}

void c5() {
  Timer timer;
  const fs::path root = scratch_dir("c5");

  struct Case {
    const char* name;
    std::string extra;
  };
  const std::vector<Case> cases{
      {"fig1", "--execs 20000 --concolic"},
      {"p0", "--execs 20000 --concolic"},
      {"multi10", "--execs 30000"},
  };
  for (const auto& c : cases) {
    const std::string base = std::string("fuzz --program ") + fixture((std::string(c.name) + ".json").c_str()) +
                             " --targets " + fixture((std::string(c.name) + "_targets.txt").c_str()) +
                             " --seeds " + fixture((std::string(c.name) + "_seeds").c_str()) +
                             " --deterministic --seed 7 --rate-init 0.05 " + c.extra;
    const fs::path out_a = root / (std::string(c.name) + "_a");
    const fs::path out_b = root / (std::string(c.name) + "_b");
    const int rc_a = run_tool(base + " --out " + out_a.string());
    const int rc_b = run_tool(base + " --out " + out_b.string());
    REQUIRE(rc_a == rc_b, c.name << ": exit codes differ: " << rc_a << " vs " << rc_b);
    REQUIRE(rc_a == 0 || rc_a == 2, c.name << ": unexpected exit code " << rc_a);

    REQUIRE(read_file(out_a / "stats.jsonl") == read_file(out_b / "stats.jsonl"),
            c.name << ": stats.jsonl differs between identical runs");
    for (const char* sub : {"queue_cov", "queue_dir", "crashes"})
      require_same_dir(out_a / sub, out_b / sub);
  }

  fs::remove_all(root);
  const double el = timer.s();
  REQUIRE(el < 60.0, "c5 took " << el << "s, limit 60s");
  std::printf(
      "PASS c5 determinism: fig1, p0, multi10 replay byte-identical stats and "
      "corpora (%.2fs)\n",
      el);
}

// ---------------------------------------------------------------------------
// c6: the combined scheduler finds all targets first on both fixtures.

CampaignConfig bench_base() {
  CampaignConfig base;
  base.exec_budget = 1'000'000;
  base.stage.rate_init = 0.05;
  base.stage.gamma = 0.1;
  base.stage.th_min = 50.0;
  base.sched.t_x = 5.0;
  return base;
}

void c6() {
  Timer timer;

  BenchConfig bc;
  bc.runs = 10;
  bc.jobs = 4;
  bc.rng_seed = 100;
  bc.base = bench_base();

  bc.base.concolic = true;
  const std::vector<BenchFixture> fig1{{"fig1", fixture("fig1.json"),
                                        fixture("fig1_targets.txt"),
                                        {Bytes{'z', 'z', 'z', 'z', 'z', 'z'}}}};
  const BenchReport rep1 = run_bench(fig1, bc);

  bc.base.concolic = false;
  const std::vector<BenchFixture> multi{{"multi10", fixture("multi10.json"),
                                         fixture("multi10_targets.txt"),
                                         {Bytes{'0', '0', '0', '0', '0', '0'}}}};
  const BenchReport rep2 = run_bench(multi, bc);

  auto medians = [](const BenchReport& rep, const std::string& fx) {
    const BenchCell* mes = rep.find(fx, Strategy::Mes);
    const BenchCell* aflgo = rep.find(fx, Strategy::AflgoDistance);
    const BenchCell* seqcov = rep.find(fx, Strategy::SeqcovSingle);
    REQUIRE(mes && aflgo && seqcov, fx << ": missing cells in the report");
    return std::array<double, 3>{mes->median_execs_to_all(),
                                 aflgo->median_execs_to_all(),
                                 seqcov->median_execs_to_all()};
  };

  const auto m1 = medians(rep1, "fig1");
  REQUIRE(m1[0] < m1[1] && m1[0] < m1[2],
          "fig1 medians: mes=" << m1[0] << " aflgo=" << m1[1] << " seqcov=" << m1[2]
                               << "; mes must be strictly lowest");
  const auto m2 = medians(rep2, "multi10");
  REQUIRE(m2[0] < m2[1] && m2[0] < m2[2],
          "multi10 medians: mes=" << m2[0] << " aflgo=" << m2[1]
                                  << " seqcov=" << m2[2] << "; mes must be strictly lowest");

  const BenchCell* mes_multi = rep2.find("multi10", Strategy::Mes);
  REQUIRE(mes_multi->all_reached_count() == bc.runs,
          "multi10: mes reached all targets in only " << mes_multi->all_reached_count()
                                                      << "/" << bc.runs << " runs");
  for (const BenchRun& r : mes_multi->runs)
    REQUIRE(r.targets_reached == 10,
            "multi10 run " << r.run << ": " << r.targets_reached << "/10 targets");

  const double el = timer.s();
  REQUIRE(el < 300.0, "c6 took " << el << "s, limit 300s");
  std::printf(
      "PASS c6 scheduling: fig1 med execs mes=%.0f aflgo=%.0f seqcov=%.0f; "
      "multi10 mes=%.0f aflgo=%.0f seqcov=%.0f, mes 10/10 runs all targets "
      "(%.2fs)\n",
      m1[0], m1[1], m1[2], m2[0], m2[1], m2[2], el);
}

// ---------------------------------------------------------------------------
// c7: a four-byte magic gate splits the engine with and without the solver.

void c7() {
  Timer timer;
  const fs::path root = scratch_dir("c7");

  json j = json::parse(read_file(fixture("fig1.json")));
  bool patched = false;
  for (auto& p : j.at("predicates"))
    if (p.at("from") == "a" && p.at("to") == "c") {
      p["value"] = "MZEI";
      patched = true;
    }
  REQUIRE(patched, "fig1.json lost its entry magic predicate");
  const fs::path prog_path = root / "fig1_magic4.json";
  std::ofstream(prog_path) << j.dump(2) << '\n';

  SimProgram prog = load_program_file(prog_path.string());
  auto targets = resolve_targets(prog.graphs, parse_targets_path(fixture("fig1_targets.txt")));
  auto seqs = generate_sequences(prog.graphs, targets, 0.5);
  prog.set_instrumented(seqs);

  std::size_t m_index = seqs.size();
  for (std::size_t i = 0; i < seqs.size(); ++i)
    if (seqs[i].target.resolved_block == "m") m_index = i;
  REQUIRE(m_index < seqs.size(), "no sequence targets block m");

  auto reaches_m = [&](bool concolic, std::uint64_t seed) {
    CampaignConfig cc = bench_base();
    cc.concolic = concolic;
    cc.rng_seed = seed;
    const CampaignResult res = run_campaign(prog, seqs, {Bytes{'z', 'z', 'z', 'z', 'z', 'z'}}, cc);
    return res.stats.targets[m_index].reached;
  };

  int with_solver = 0, without_solver = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    if (reaches_m(true, seed)) ++with_solver;
    if (reaches_m(false, seed)) ++without_solver;
  }
  REQUIRE(with_solver == 10,
          "with the solver only " << with_solver << "/10 runs reached m");
  REQUIRE(without_solver < 10,
          "without the solver all 10 runs reached m; the gate is too weak");

  fs::remove_all(root);
  const double el = timer.s();
  REQUIRE(el < 120.0, "c7 took " << el << "s, limit 120s");
  std::printf(
      "PASS c7 solver differential: reached m with solver 10/10, without %d/10 "
      "(%.2fs)\n",
      without_solver, el);
}

// ---------------------------------------------------------------------------
// c8: the rate update against a long-double reference.

void c8() {
  Timer timer;
  std::mt19937_64 rng(4096);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  for (int round = 0; round < 100; ++round) {
    StageConfig cfg;
    cfg.gamma = uniform(1e-6, 0.5);
    cfg.delta = uniform(1e-6, 1.0 - 1e-6);
    StageState st = make_stage_state(cfg, 0.0);
    st.rate = uniform(0.0, 1.0);
    st.cdsc = static_cast<long>(rng() % 10'000);
    st.epoch = static_cast<long>(rng() % 51);
    st.stage_started_at = uniform(0.0, 100.0);
    const double now = st.stage_started_at + uniform(0.1, 5000.0);

    const double t_eff = std::max(1.0, std::floor(now - st.stage_started_at));
    const long double want = oracles::rate_reference(
        st.rate, static_cast<long double>(st.cdsc), t_eff,
        static_cast<long double>(st.epoch), cfg.gamma, cfg.delta);
    const double got = update_rate(st, now);
    REQUIRE(near(got, static_cast<double>(want), 1e-9),
            "round " << round << ": rate " << got << " vs reference "
                     << static_cast<double>(want));
  }

  const double el = timer.s();
  std::printf("PASS c8 rate update: 100/100 tuples within 1e-9 of the reference (%.2fs)\n",
              el);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  const std::map<std::string, void (*)()> table{
      {"c1", c1}, {"c2", c2}, {"c3", c3}, {"c4", c4},
      {"c5", c5}, {"c6", c6}, {"c7", c7}, {"c8", c8},
  };
  if (which == "all") {
    for (const auto& [name, fn] : table) fn();
    std::printf("PASS all\n");
    return 0;
  }
  const auto it = table.find(which);
  if (it == table.end()) {
    std::fprintf(stderr, "usage: acceptance <c1..c8|all>\n");
    return 2;
  }
  it->second();
  return 0;
}
