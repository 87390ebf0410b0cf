#include "leofuzz/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace leofuzz {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config key " + key + ": expected a boolean, got '" + v + "'");
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (...) {
    throw Error("config key " + key + ": expected a number, got '" + v + "'");
  }
  if (pos != v.size())
    throw Error("config key " + key + ": expected a number, got '" + v + "'");
  return d;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &pos);
  } catch (...) {
    throw Error("config key " + key + ": expected an integer, got '" + v + "'");
  }
  if (pos != v.size())
    throw Error("config key " + key + ": expected an integer, got '" + v + "'");
  return n;
}

int to_int(const std::string& key, const std::string& v) {
  return static_cast<int>(to_u64(key, v));
}

struct ConfEntry {
  std::string key;   // long flag name without leading dashes
  std::function<void(const std::string&)> set;
};

// Config file values apply only where the command line stayed silent.
void apply_config(const std::string& path, CLI::App* sub,
                  const std::vector<ConfEntry>& table) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path);
  auto kv = parse_config_file(in, path);
  for (const auto& [raw_key, value] : kv) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    const ConfEntry* hit = nullptr;
    for (const auto& e : table)
      if (e.key == key) {
        hit = &e;
        break;
      }
    if (!hit) throw Error(path + ": unknown config key '" + raw_key + "'");
    if (sub->count("--" + key) == 0) hit->set(value);
  }
}

std::vector<Strategy> parse_strategy_list(const std::string& text) {
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto s = strategy_from_name(item);
    if (!s) throw Error("unknown strategy '" + item + "'");
    out.push_back(*s);
  }
  if (out.empty()) throw Error("no strategies given");
  return out;
}

json summary_json(const CampaignResult& res, Strategy strat) {
  json targets = json::array();
  for (std::size_t i = 0; i < res.sequences.size(); ++i) {
    const auto& ts = res.sequences[i];
    const auto& st = res.stats.targets[i];
    targets.push_back({{"file", ts.target.location.file},
                       {"line", ts.target.location.line},
                       {"block", ts.target.resolved_block},
                       {"reached", st.reached},
                       {"exec_index", st.exec_index},
                       {"time_s", st.time_s},
                       {"priority", ts.priority},
                       {"g_max_cov", ts.g_max_cov}});
  }
  return json{{"strategy", strategy_name(strat)},
              {"executions", res.stats.executions},
              {"targets", std::move(targets)},
              {"targets_reached", res.stats.targets_reached()},
              {"all_targets_at", res.stats.all_targets_at ? json(*res.stats.all_targets_at)
                                                          : json(nullptr)},
              {"crash_unique", res.stats.crash_unique},
              {"crash_total", res.stats.crash_total},
              {"cq", res.cq_items.size()},
              {"dq", res.dq_items.size()},
              {"discards", res.stats.discards},
              {"selections", res.stats.selections},
              {"stage_transitions", res.stats.stage_transitions},
              {"queue_fallbacks", res.stats.queue_fallbacks},
              {"concolic_candidates", res.stats.concolic_candidates}};
}

}  // namespace

double parse_duration_s(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw Error("empty duration");
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &pos);
  } catch (...) {
    throw Error("malformed duration '" + text + "'");
  }
  double mult = 1.0;
  if (pos < t.size()) {
    if (pos + 1 != t.size()) throw Error("malformed duration '" + text + "'");
    switch (t[pos]) {
      case 's': mult = 1.0; break;
      case 'm': mult = 60.0; break;
      case 'h': mult = 3600.0; break;
      default: throw Error("malformed duration '" + text + "'");
    }
  }
  if (value < 0.0) throw Error("negative duration '" + text + "'");
  return value * mult;
}

std::map<std::string, std::string> parse_config_file(std::istream& in,
                                                     const std::string& origin) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(origin + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second)
      throw Error(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return out;
}

std::vector<Bytes> load_seed_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error("seed directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir))
    if (de.is_regular_file()) files.push_back(de.path());
  std::sort(files.begin(), files.end());
  std::vector<Bytes> out;
  for (const auto& p : files) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read seed file " + p.string());
    Bytes b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out.push_back(std::move(b));
  }
  if (out.empty()) throw Error("no seed files in " + dir);
  return out;
}

void write_sequences(std::ostream& out, std::span<const TargetSequence> seqs) {
  for (const auto& ts : seqs) {
    json j{{"target",
            {{"file", ts.target.location.file},
             {"line", ts.target.location.line},
             {"block", ts.target.resolved_block},
             {"function", ts.target.resolved_function}}},
           {"blocks", ts.blocks},
           {"priority", ts.priority}};
    out << j.dump() << '\n';
  }
}

std::vector<TargetSequence> read_sequences(std::istream& in, const std::string& origin) {
  std::vector<TargetSequence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("target") || !j.contains("blocks"))
      throw Error(where + ": expected {target, blocks, priority}");
    const json& t = j.at("target");
    TargetSequence ts;
    try {
      ts.target.location.file = t.at("file").get<std::string>();
      ts.target.location.line = t.at("line").get<int>();
      ts.target.resolved_block = t.at("block").get<std::string>();
      ts.target.resolved_function = t.at("function").get<std::string>();
      ts.blocks = j.at("blocks").get<std::vector<BlockId>>();
      ts.priority = j.value("priority", 0);
    } catch (const json::exception& e) {
      throw Error(where + ": " + e.what());
    }
    if (ts.blocks.empty() || ts.blocks.back() != ts.target.resolved_block)
      throw Error(where + ": sequence must end at its target block");
    out.push_back(std::move(ts));
  }
  if (out.empty()) throw Error(origin + ": no sequences");
  return out;
}

int cmd_genseq(const GenseqArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.epsilon < 0.0 || args.epsilon > 1.0)
      throw Error("epsilon must be in [0, 1]");
    ProgramGraphs pg = parse_graphs_file(args.graphs_path);
    auto targets = resolve_targets(pg, parse_targets_path(args.targets_path));
    auto seqs = generate_sequences(pg, targets, args.epsilon);
    if (args.out_path.empty()) {
      write_sequences(out, seqs);
    } else {
      std::ofstream f(args.out_path, std::ios::trunc);
      if (!f) throw Error("cannot write " + args.out_path);
      write_sequences(f, seqs);
      out << "wrote " << seqs.size() << " sequences to " << args.out_path << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << "genseq: " << e.what() << '\n';
    return 1;
  }
}

int cmd_fuzz(const FuzzArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const std::string program_path =
        args.program_path.empty() ? args.graphs_path : args.program_path;
    if (program_path.empty()) throw Error("a program file is required");
    SimProgram prog = load_program_file(program_path);

    std::vector<TargetSequence> seqs;
    if (!args.sequences_path.empty()) {
      std::ifstream f(args.sequences_path);
      if (!f) throw Error("cannot read " + args.sequences_path);
      seqs = read_sequences(f, args.sequences_path);
    } else {
      if (args.targets_path.empty()) throw Error("a targets file is required");
      auto targets = resolve_targets(prog.graphs, parse_targets_path(args.targets_path));
      seqs = generate_sequences(prog.graphs, targets, args.campaign.sched.epsilon);
    }

    auto seeds = load_seed_dir(args.seeds_dir);
    prog.set_instrumented(seqs);

    CampaignConfig cc = args.campaign;
    cc.out_dir = args.out_dir;
    if (!args.budget.empty()) cc.time_budget_s = parse_duration_s(args.budget);

    CampaignResult res = run_campaign(prog, seqs, seeds, cc);

    const std::size_t reached = res.stats.targets_reached();
    const std::size_t total = res.stats.targets.size();
    out << "executions=" << res.stats.executions << " targets=" << reached << "/"
        << total << " crashes_unique=" << res.stats.crash_unique
        << " crashes_total=" << res.stats.crash_total << " cq=" << res.cq_items.size()
        << " dq=" << res.dq_items.size() << '\n';
    if (res.stats.all_targets_at)
      out << "all targets reached at execution " << *res.stats.all_targets_at << '\n';

    if (!args.out_dir.empty()) {
      std::ofstream f(fs::path(args.out_dir) / "summary.json", std::ios::trunc);
      if (!f) throw Error("cannot write " + args.out_dir + "/summary.json");
      f << summary_json(res, cc.strategy).dump(2) << '\n';
    }
    return reached == total ? 0 : 2;
  } catch (const std::exception& e) {
    err << "fuzz: " << e.what() << '\n';
    return 1;
  }
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.fixture_specs.empty()) throw Error("at least one --fixture is required");
    auto seeds = load_seed_dir(args.seeds_dir);
    std::vector<BenchFixture> fixtures;
    for (const auto& spec : args.fixture_specs) {
      std::vector<std::string> parts;
      std::stringstream ss(spec);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(item);
      if (parts.size() != 2 && parts.size() != 3)
        throw Error("fixture spec must be program.json:targets.txt[:name], got '" +
                    spec + "'");
      BenchFixture fx;
      fx.program_path = parts[0];
      fx.targets_path = parts[1];
      fx.name = parts.size() == 3 ? parts[2] : fs::path(parts[0]).stem().string();
      fx.seeds = seeds;
      fixtures.push_back(std::move(fx));
    }
    BenchReport rep = run_bench(fixtures, args.bench);
    out << rep.format_table();
    if (!args.out_path.empty()) {
      std::ofstream f(args.out_path, std::ios::trunc);
      if (!f) throw Error("cannot write " + args.out_path);
      f << rep.to_json() << '\n';
      out << "wrote " << args.out_path << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << "bench: " << e.what() << '\n';
    return 1;
  }
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(args.stats_path);
    if (!in) throw Error("cannot read " + args.stats_path);
    std::map<std::string, std::uint64_t> counts;
    json start, end_ev;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        throw Error(args.stats_path + ":" + std::to_string(lineno) + ": " + e.what());
      }
      const std::string ev = j.value("event", "");
      ++counts[ev];
      if (ev == "campaign_start") start = j;
      if (ev == "end") end_ev = j;
    }
    if (start.is_null()) throw Error(args.stats_path + ": no campaign_start event");
    out << "strategy=" << start.value("strategy", "?")
        << " rng_seed=" << start.value("rng_seed", 0ULL)
        << " exec_budget=" << start.value("exec_budget", 0ULL)
        << " targets=" << start.value("targets", 0ULL) << '\n';
    out << "events:";
    for (const auto& [k, v] : counts) out << ' ' << k << '=' << v;
    out << '\n';
    if (!end_ev.is_null()) {
      out << "end: execs=" << end_ev.value("execs", 0ULL)
          << " targets_reached=" << end_ev.value("targets_reached", 0ULL)
          << " crash_unique=" << end_ev.value("crash_unique", 0ULL)
          << " cq=" << end_ev.value("cq", 0ULL) << " dq=" << end_ev.value("dq", 0ULL)
          << " t=" << end_ev.value("t", 0.0) << '\n';
    } else {
      out << "end: (campaign still running or truncated log)\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "report: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"directed greybox fuzzing over simulated program graphs", "leofuzz"};
  app.require_subcommand(1);

  GenseqArgs ga;
  auto* genseq = app.add_subcommand("genseq", "generate target sequences from graphs");
  genseq->add_option("--graphs", ga.graphs_path, "program graphs JSON")->required();
  genseq->add_option("--targets", ga.targets_path, "targets file, one file:line per line")
      ->required();
  genseq->add_option("--out", ga.out_path, "output path (default: stdout)");
  genseq->add_option("--epsilon", ga.epsilon, "similarity threshold for priorities")
      ->check(CLI::Range(0.0, 1.0));

  FuzzArgs fa;
  std::string fz_strategy = "mes";
  std::string fz_config;
  bool fz_wallclock = false;
  bool fz_keep_going = false;
  auto* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
  fuzz->add_option("--program", fa.program_path, "program JSON (graphs + predicates)")
      ->required();
  fuzz->add_option("--targets", fa.targets_path, "targets file, one file:line per line");
  fuzz->add_option("--sequences", fa.sequences_path, "precomputed sequences (genseq output)");
  fuzz->add_option("--seeds", fa.seeds_dir, "directory of initial seed files")->required();
  fuzz->add_option("--out", fa.out_dir, "output directory")->capture_default_str();
  fuzz->add_option("--config", fz_config, "key=value config file");
  fuzz->add_option("--strategy", fz_strategy,
                   "mes | aflgo_distance | seqcov_single")->capture_default_str();
  fuzz->add_option("--execs", fa.campaign.exec_budget, "execution budget")->capture_default_str();
  fuzz->add_option("--budget", fa.budget, "time budget, e.g. 90s, 5m, 1h");
  fuzz->add_option("--seed", fa.campaign.rng_seed, "RNG seed")->capture_default_str();
  fuzz->add_option("--epsilon", fa.campaign.sched.epsilon, "similarity threshold")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  fuzz->add_option("--beta", fa.campaign.sched.beta, "completion threshold")->capture_default_str();
  fuzz->add_option("--alpha", fa.campaign.sched.alpha, "annealing decay")->capture_default_str();
  fuzz->add_option("--tk", fa.campaign.sched.t_k, "temperature floor")->capture_default_str();
  fuzz->add_option("--tx", fa.campaign.sched.t_x,
                   "exploitation midpoint seconds (<=0: half the budget)");
  fuzz->add_option("--base-energy", fa.campaign.sched.base_energy, "base energy")->capture_default_str();
  fuzz->add_option("--rate-init", fa.campaign.stage.rate_init, "initial switch rate")->capture_default_str();
  fuzz->add_option("--gamma", fa.campaign.stage.gamma, "rate adjustment scale")->capture_default_str();
  fuzz->add_option("--delta", fa.campaign.stage.delta, "rate adjustment offset")->capture_default_str();
  fuzz->add_option("--th-min", fa.campaign.stage.th_min, "exploitation threshold floor")->capture_default_str();
  fuzz->add_flag("--concolic", fa.campaign.concolic, "enable the concolic helper");
  fuzz->add_flag("--concolic-threaded", fa.campaign.concolic_threaded,
                 "run the concolic helper on its own thread (wallclock mode only)");
  fuzz->add_option("--concolic-interval", fa.campaign.concolic_interval,
                   "iterations between concolic steps")->capture_default_str();
  fuzz->add_option("--concolic-max-solves", fa.campaign.concolic_max_solves,
                   "branch solves per concolic step")->capture_default_str();
  fuzz->add_flag("--wallclock", fz_wallclock,
                 "use wall-clock time instead of the virtual clock");
  bool fz_deterministic = false;
  fuzz->add_flag("--deterministic", fz_deterministic,
                 "force the virtual clock (the default; overrides wallclock)")
      ->excludes("--wallclock");
  fuzz->add_option("--virtual-rate", fa.campaign.virtual_exec_rate,
                   "virtual clock executions per second")->capture_default_str();
  fuzz->add_flag("--keep-going", fz_keep_going, "do not stop once all targets are reached");
  fuzz->add_option("--max-len", fa.campaign.mutation.max_len, "input length cap")->capture_default_str();

  BenchArgs ba;
  std::string bn_strategies = "mes,aflgo_distance,seqcov_single";
  std::string bn_config;
  auto* bench = app.add_subcommand("bench", "compare strategies over repeated campaigns");
  bench->add_option("--fixture", ba.fixture_specs,
                    "program.json:targets.txt[:name] (repeatable)")
      ->required();
  bench->add_option("--seeds", ba.seeds_dir, "directory of initial seed files")->required();
  bench->add_option("--out", ba.out_path, "JSON report path");
  bench->add_option("--config", bn_config, "key=value config file");
  bench->add_option("--strategies", bn_strategies, "comma-separated strategy list")->capture_default_str();
  bench->add_option("--runs", ba.bench.runs, "campaigns per fixture/strategy")->capture_default_str();
  bench->add_option("--jobs", ba.bench.jobs, "parallel campaigns")->capture_default_str();
  bench->add_option("--execs", ba.bench.base.exec_budget, "execution budget per run")->capture_default_str();
  bench->add_option("--seed", ba.bench.rng_seed, "base RNG seed (run i adds i)")->capture_default_str();
  bench->add_option("--epsilon", ba.bench.base.sched.epsilon, "similarity threshold")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--beta", ba.bench.base.sched.beta, "completion threshold")->capture_default_str();
  bench->add_option("--alpha", ba.bench.base.sched.alpha, "annealing decay")->capture_default_str();
  bench->add_option("--tk", ba.bench.base.sched.t_k, "temperature floor")->capture_default_str();
  bench->add_option("--tx", ba.bench.base.sched.t_x,
                    "exploitation midpoint seconds (<=0: half the budget)");
  bench->add_option("--base-energy", ba.bench.base.sched.base_energy, "base energy")->capture_default_str();
  bench->add_option("--rate-init", ba.bench.base.stage.rate_init, "initial switch rate")->capture_default_str();
  bench->add_option("--gamma", ba.bench.base.stage.gamma, "rate adjustment scale")->capture_default_str();
  bench->add_option("--delta", ba.bench.base.stage.delta, "rate adjustment offset")->capture_default_str();
  bench->add_option("--th-min", ba.bench.base.stage.th_min,
                    "exploitation threshold floor")->capture_default_str();

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "summarize a campaign stats log");
  report->add_option("--stats", ra.stats_path, "stats.jsonl path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (genseq->parsed()) return cmd_genseq(ga, std::cout, std::cerr);

    if (fuzz->parsed()) {
      if (!fz_config.empty()) {
        const std::vector<ConfEntry> table{
            {"strategy", [&](const std::string& v) { fz_strategy = v; }},
            {"execs", [&](const std::string& v) { fa.campaign.exec_budget = to_u64("execs", v); }},
            {"budget", [&](const std::string& v) { fa.budget = v; }},
            {"seed", [&](const std::string& v) { fa.campaign.rng_seed = to_u64("seed", v); }},
            {"epsilon", [&](const std::string& v) { fa.campaign.sched.epsilon = to_double("epsilon", v); }},
            {"beta", [&](const std::string& v) { fa.campaign.sched.beta = to_double("beta", v); }},
            {"alpha", [&](const std::string& v) { fa.campaign.sched.alpha = to_double("alpha", v); }},
            {"tk", [&](const std::string& v) { fa.campaign.sched.t_k = to_double("tk", v); }},
            {"tx", [&](const std::string& v) { fa.campaign.sched.t_x = to_double("tx", v); }},
            {"base-energy", [&](const std::string& v) { fa.campaign.sched.base_energy = to_int("base-energy", v); }},
            {"rate-init", [&](const std::string& v) { fa.campaign.stage.rate_init = to_double("rate-init", v); }},
            {"gamma", [&](const std::string& v) { fa.campaign.stage.gamma = to_double("gamma", v); }},
            {"delta", [&](const std::string& v) { fa.campaign.stage.delta = to_double("delta", v); }},
            {"th-min", [&](const std::string& v) { fa.campaign.stage.th_min = to_double("th-min", v); }},
            {"concolic", [&](const std::string& v) { fa.campaign.concolic = to_bool("concolic", v); }},
            {"concolic-threaded", [&](const std::string& v) { fa.campaign.concolic_threaded = to_bool("concolic-threaded", v); }},
            {"concolic-interval", [&](const std::string& v) { fa.campaign.concolic_interval = to_int("concolic-interval", v); }},
            {"concolic-max-solves", [&](const std::string& v) { fa.campaign.concolic_max_solves = to_int("concolic-max-solves", v); }},
            {"wallclock", [&](const std::string& v) { fz_wallclock = to_bool("wallclock", v); }},
            {"virtual-rate", [&](const std::string& v) { fa.campaign.virtual_exec_rate = to_double("virtual-rate", v); }},
            {"keep-going", [&](const std::string& v) { fz_keep_going = to_bool("keep-going", v); }},
            {"max-len", [&](const std::string& v) { fa.campaign.mutation.max_len = static_cast<std::size_t>(to_u64("max-len", v)); }},
        };
        apply_config(fz_config, fuzz, table);
      }
      auto st = strategy_from_name(fz_strategy);
      if (!st) {
        std::cerr << "fuzz: unknown strategy '" << fz_strategy << "'\n";
        return 1;
      }
      fa.campaign.strategy = *st;
      fa.campaign.deterministic = fz_deterministic || !fz_wallclock;
      fa.campaign.stop_on_all_targets = !fz_keep_going;
      return cmd_fuzz(fa, std::cout, std::cerr);
    }

    if (bench->parsed()) {
      if (!bn_config.empty()) {
        const std::vector<ConfEntry> table{
            {"strategies", [&](const std::string& v) { bn_strategies = v; }},
            {"runs", [&](const std::string& v) { ba.bench.runs = to_int("runs", v); }},
            {"jobs", [&](const std::string& v) { ba.bench.jobs = to_int("jobs", v); }},
            {"execs", [&](const std::string& v) { ba.bench.base.exec_budget = to_u64("execs", v); }},
            {"seed", [&](const std::string& v) { ba.bench.rng_seed = to_u64("seed", v); }},
            {"epsilon", [&](const std::string& v) { ba.bench.base.sched.epsilon = to_double("epsilon", v); }},
            {"beta", [&](const std::string& v) { ba.bench.base.sched.beta = to_double("beta", v); }},
            {"alpha", [&](const std::string& v) { ba.bench.base.sched.alpha = to_double("alpha", v); }},
            {"tk", [&](const std::string& v) { ba.bench.base.sched.t_k = to_double("tk", v); }},
            {"tx", [&](const std::string& v) { ba.bench.base.sched.t_x = to_double("tx", v); }},
            {"base-energy", [&](const std::string& v) { ba.bench.base.sched.base_energy = to_int("base-energy", v); }},
            {"rate-init", [&](const std::string& v) { ba.bench.base.stage.rate_init = to_double("rate-init", v); }},
            {"gamma", [&](const std::string& v) { ba.bench.base.stage.gamma = to_double("gamma", v); }},
            {"delta", [&](const std::string& v) { ba.bench.base.stage.delta = to_double("delta", v); }},
            {"th-min", [&](const std::string& v) { ba.bench.base.stage.th_min = to_double("th-min", v); }},
        };
        apply_config(bn_config, bench, table);
      }
      ba.bench.strategies = parse_strategy_list(bn_strategies);
      return cmd_bench(ba, std::cout, std::cerr);
    }

    if (report->parsed()) return cmd_report(ra, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "leofuzz: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace leofuzz
