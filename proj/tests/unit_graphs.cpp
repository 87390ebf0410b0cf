#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "leofuzz/graphs.hpp"
#include "support/oracles.hpp"

using namespace leofuzz;

namespace {

ProgramGraphs graphs_from(const std::string& text) {
  std::istringstream in(text);
  return parse_graphs(in, "<test>");
}

const char* kTiny = R"({
  "entry_function": "main",
  "functions": [
    {"name": "main", "entry_block": "e",
     "blocks": [{"id": "e"}, {"id": "x", "lines": [["t.c", 7]]}],
     "edges": [["e", "x"]],
     "calls": [{"block": "x", "callees": ["aux"]}]},
    {"name": "aux", "entry_block": "a0", "blocks": [{"id": "a0"}]}
  ]
})";

}  // namespace

TEST_SUITE("graphs") {

TEST_CASE("parse accepts a minimal two-function program") {
  ProgramGraphs pg = graphs_from(kTiny);
  CHECK(pg.entry_function == "main");
  REQUIRE(pg.functions.size() == 2);
  CHECK(pg.find_function("aux") != nullptr);
  CHECK(pg.function_of_block("x")->name == "main");
  REQUIRE(pg.find_block("x") != nullptr);
  CHECK(pg.find_block("x")->lines.at(0) == SourceLoc{"t.c", 7});
  CHECK(icfg_entry(pg) == "e");
}

TEST_CASE("parse rejects malformed programs") {
  auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(graphs_from(text), Error);
  };
  bad("[]");
  bad(R"({"entry_function": "main", "functions": []})");  // entry undefined
  bad(R"({"entry_function": "m",
          "functions": [{"name": "m", "entry_block": "a", "blocks": [{"id": "a"}]},
                        {"name": "m", "entry_block": "b", "blocks": [{"id": "b"}]}]})");
  bad(R"({"entry_function": "m",
          "functions": [{"name": "m", "entry_block": "a", "blocks": [{"id": "a"}]},
                        {"name": "n", "entry_block": "a", "blocks": [{"id": "a"}]}]})");
  bad(R"({"entry_function": "m",
          "functions": [{"name": "m", "entry_block": "q", "blocks": [{"id": "a"}]}]})");
  bad(R"({"entry_function": "m",
          "functions": [{"name": "m", "entry_block": "a", "blocks": [{"id": "a"}],
                         "edges": [["a", "zzz"]]}]})");
  bad(R"({"entry_function": "m",
          "functions": [{"name": "m", "entry_block": "a", "blocks": [{"id": "a"}],
                         "calls": [{"block": "a", "callees": ["ghost"]}]}]})");
  bad(R"({"entry_function": "m",
          "functions": [{"name": "m", "entry_block": "a",
                         "blocks": [{"id": "a", "lines": [["t.c"]]}]}]})");
}

TEST_CASE("call graph and icfg view") {
  ProgramGraphs pg = parse_graphs_file(std::string(LEOFUZZ_FIXTURE_DIR) + "/fig3.json");
  Digraph cg = call_graph(pg);
  CHECK(cg.nodes.size() == 6);
  auto has_edge = [&](const Digraph& g, const std::string& a, const std::string& b) {
    for (const auto& e : g.edges)
      if (e.first == a && e.second == b) return true;
    return false;
  };
  CHECK(has_edge(cg, "main", "A"));
  CHECK(has_edge(cg, "main", "B"));
  CHECK(has_edge(cg, "A", "G"));
  CHECK(has_edge(cg, "B", "C"));
  CHECK_FALSE(has_edge(cg, "B", "G"));

  Digraph icfg = icfg_view(pg);
  CHECK(has_edge(icfg, "main1", "A1"));   // call edge
  CHECK(has_edge(icfg, "A1", "entry"));   // call edge into G
  CHECK(has_edge(icfg, "entry", "a"));    // intra edge
  CHECK_FALSE(has_edge(icfg, "g", "A1")); // calls do not return
}

TEST_CASE("dominators on a diamond with a join") {
  Digraph g;
  g.nodes = {"r", "b", "c", "d", "e"};
  g.edges = {{"r", "b"}, {"r", "c"}, {"b", "d"}, {"c", "d"}, {"d", "e"}};
  DominatorTree t = compute_dominators(g, "r");
  CHECK(t.idom.at("r") == "r");
  CHECK(t.idom.at("d") == "r");
  CHECK(t.idom.at("e") == "d");
  CHECK(t.dominators_of("e") == std::vector<std::string>{"r", "d", "e"});
  CHECK(t.dominates("r", "e"));
  CHECK(t.dominates("d", "e"));
  CHECK_FALSE(t.dominates("b", "e"));
  CHECK_FALSE(t.dominates("e", "d"));
}

TEST_CASE("dominators tolerate cycles and unreachable nodes") {
  Digraph g;
  g.nodes = {"r", "a", "b", "u"};
  g.edges = {{"r", "a"}, {"a", "b"}, {"b", "a"}, {"u", "a"}};
  DominatorTree t = compute_dominators(g, "r");
  CHECK(t.idom.at("a") == "r");
  CHECK(t.idom.at("b") == "a");
  CHECK(t.idom.count("u") == 0);
  CHECK(t.dominators_of("u").empty());
}

TEST_CASE("dominator construction matches the all-paths oracle on random digraphs") {
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 25; ++iter) {
    const int n = 3 + static_cast<int>(rng() % 7);
    Digraph g;
    for (int i = 0; i < n; ++i) g.nodes.push_back("n" + std::to_string(i));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng() % 100 < 30) g.edges.emplace_back(g.nodes[i], g.nodes[j]);
    DominatorTree t = compute_dominators(g, "n0");
    for (const auto& node : g.nodes) {
      auto expected = oracles::dominators_bruteforce(g, "n0", node);
      auto got = t.dominators_of(node);
      std::sort(got.begin(), got.end());
      CHECK(got == expected);
    }
  }
}

TEST_CASE("target resolution by source location") {
  ProgramGraphs pg = graphs_from(kTiny);
  Target t = resolve_target(pg, {"t.c", 7});
  CHECK(t.resolved_block == "x");
  CHECK(t.resolved_function == "main");
  CHECK_THROWS_WITH_AS(resolve_target(pg, {"t.c", 99}),
                       doctest::Contains("no block maps"), Error);

  ProgramGraphs dup = graphs_from(R"({
    "entry_function": "m",
    "functions": [{"name": "m", "entry_block": "a",
                   "blocks": [{"id": "a", "lines": [["d.c", 1]]},
                              {"id": "b", "lines": [["d.c", 1]]}],
                   "edges": [["a", "b"]]}]})");
  CHECK_THROWS_WITH_AS(resolve_target(dup, {"d.c", 1}), doctest::Contains("ambiguous"),
                       Error);
}

TEST_CASE("targets file parsing") {
  std::istringstream in("# header\nobjdump.c:2508\n  libbfd.c:271  # trailing\n\n");
  auto locs = parse_targets_file(in, "<test>");
  REQUIRE(locs.size() == 2);
  CHECK(locs[0] == SourceLoc{"objdump.c", 2508});
  CHECK(locs[1] == SourceLoc{"libbfd.c", 271});

  std::istringstream bad1("nocolon\n");
  CHECK_THROWS_AS(parse_targets_file(bad1, "<test>"), Error);
  std::istringstream bad2("f.c:12x\n");
  CHECK_THROWS_AS(parse_targets_file(bad2, "<test>"), Error);
}

TEST_CASE("interprocedural sequence crosses the dominating call chain") {
  ProgramGraphs pg = parse_graphs_file(std::string(LEOFUZZ_FIXTURE_DIR) + "/fig3.json");
  Target t = resolve_target(pg, {"g.c", 10});
  TargetSequence ts = generate_target_sequence(pg, t);
  CHECK(ts.blocks ==
        std::vector<BlockId>{"main1", "A1", "entry", "a", "f", "g"});
}

TEST_CASE("sequences for the two-target graph") {
  ProgramGraphs pg = parse_graphs_file(std::string(LEOFUZZ_FIXTURE_DIR) + "/fig1.json");
  auto targets = resolve_targets(
      pg, parse_targets_path(std::string(LEOFUZZ_FIXTURE_DIR) + "/fig1_targets.txt"));
  auto seqs = generate_sequences(pg, targets, 0.5);
  REQUIRE(seqs.size() == 2);
  CHECK(seqs[0].blocks == std::vector<BlockId>{"a", "c", "e", "i", "m"});
  CHECK(seqs[1].blocks == std::vector<BlockId>{"a", "b", "d", "k", "p"});
  CHECK(seqs[0].priority == 0);
  CHECK(seqs[1].priority == 0);
  CHECK(seqs[0].g_max_cov == 0.0);
}

TEST_CASE("every entry-to-target path visits every sequence block") {
  for (const char* name : {"/fig1.json", "/fig3.json", "/multi10.json"}) {
    ProgramGraphs pg = parse_graphs_file(std::string(LEOFUZZ_FIXTURE_DIR) + name);
    std::string targets_path(LEOFUZZ_FIXTURE_DIR);
    targets_path += name;
    targets_path.replace(targets_path.rfind(".json"), 5, "_targets.txt");
    auto targets = resolve_targets(pg, parse_targets_path(targets_path));
    Digraph icfg = icfg_view(pg);
    for (const auto& target : targets) {
      TargetSequence ts = generate_target_sequence(pg, target);
      auto paths = oracles::simple_paths(icfg, icfg_entry(pg), target.resolved_block);
      REQUIRE(!paths.empty());
      for (const auto& path : paths) {
        std::set<std::string> on(path.begin(), path.end());
        for (const auto& b : ts.blocks) CHECK(on.count(b) == 1);
      }
    }
  }
}

TEST_CASE("unreachable targets are rejected") {
  ProgramGraphs pg = graphs_from(R"({
    "entry_function": "m",
    "functions": [{"name": "m", "entry_block": "a",
                   "blocks": [{"id": "a"}, {"id": "b", "lines": [["u.c", 3]]}],
                   "edges": [["b", "a"]]}]})");
  Target t = resolve_target(pg, {"u.c", 3});
  CHECK_THROWS_WITH_AS(generate_target_sequence(pg, t), doctest::Contains("unreachable"),
                       Error);
}

}  // TEST_SUITE
