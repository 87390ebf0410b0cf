#include "leofuzz/graphs.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace leofuzz {

using nlohmann::json;

const Function* ProgramGraphs::find_function(const std::string& name) const {
  for (const auto& fn : functions)
    if (fn.name == name) return &fn;
  return nullptr;
}

const Function* ProgramGraphs::function_of_block(const BlockId& id) const {
  for (const auto& fn : functions)
    for (const auto& b : fn.blocks)
      if (b.id == id) return &fn;
  return nullptr;
}

const CfgBlock* ProgramGraphs::find_block(const BlockId& id) const {
  for (const auto& fn : functions)
    for (const auto& b : fn.blocks)
      if (b.id == id) return &b;
  return nullptr;
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw Error(origin + ": " + msg);
}

SourceLoc parse_loc_pair(const json& j, const std::string& origin) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_number_integer())
    fail(origin, "line entry must be a [file, line] pair");
  return SourceLoc{j[0].get<std::string>(), j[1].get<int>()};
}

}  // namespace

ProgramGraphs parse_graphs(std::istream& in, const std::string& origin) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    fail(origin, std::string("JSON syntax error: ") + e.what());
  }
  if (!root.is_object()) fail(origin, "top-level value must be an object");
  if (!root.contains("entry_function") || !root["entry_function"].is_string())
    fail(origin, "missing string field 'entry_function'");
  if (!root.contains("functions") || !root["functions"].is_array())
    fail(origin, "missing array field 'functions'");

  ProgramGraphs pg;
  pg.entry_function = root["entry_function"].get<std::string>();

  std::unordered_set<std::string> fn_names;
  std::unordered_set<std::string> block_ids;
  for (const auto& jf : root["functions"]) {
    Function fn;
    if (!jf.contains("name") || !jf["name"].is_string())
      fail(origin, "function without string field 'name'");
    fn.name = jf["name"].get<std::string>();
    const std::string where = "function '" + fn.name + "'";
    if (!fn_names.insert(fn.name).second)
      fail(origin, "duplicate function name '" + fn.name + "'");
    if (!jf.contains("entry_block") || !jf["entry_block"].is_string())
      fail(origin, where + ": missing string field 'entry_block'");
    fn.entry_block = jf["entry_block"].get<std::string>();
    if (!jf.contains("blocks") || !jf["blocks"].is_array())
      fail(origin, where + ": missing array field 'blocks'");

    std::unordered_set<std::string> local;
    for (const auto& jb : jf["blocks"]) {
      CfgBlock b;
      if (!jb.contains("id") || !jb["id"].is_string())
        fail(origin, where + ": block without string field 'id'");
      b.id = jb["id"].get<std::string>();
      if (!block_ids.insert(b.id).second)
        fail(origin, where + ": block id '" + b.id + "' is not globally unique");
      local.insert(b.id);
      if (jb.contains("lines")) {
        if (!jb["lines"].is_array())
          fail(origin, where + ": block '" + b.id + "': 'lines' must be an array");
        for (const auto& jl : jb["lines"])
          b.lines.push_back(parse_loc_pair(jl, origin + ": " + where + ": block '" + b.id + "'"));
      }
      fn.blocks.push_back(std::move(b));
    }
    if (!local.count(fn.entry_block))
      fail(origin, where + ": entry_block '" + fn.entry_block + "' is not one of its blocks");

    if (jf.contains("edges")) {
      if (!jf["edges"].is_array()) fail(origin, where + ": 'edges' must be an array");
      for (const auto& je : jf["edges"]) {
        if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string())
          fail(origin, where + ": edge entries must be [from, to] id pairs");
        auto from = je[0].get<std::string>(), to = je[1].get<std::string>();
        if (!local.count(from) || !local.count(to))
          fail(origin, where + ": edge " + from + " -> " + to + " references a block outside the function");
        fn.edges.emplace_back(std::move(from), std::move(to));
      }
    }
    if (jf.contains("calls")) {
      if (!jf["calls"].is_array()) fail(origin, where + ": 'calls' must be an array");
      for (const auto& jc : jf["calls"]) {
        CallSite cs;
        if (!jc.contains("block") || !jc["block"].is_string())
          fail(origin, where + ": call site without string field 'block'");
        cs.block = jc["block"].get<std::string>();
        if (!local.count(cs.block))
          fail(origin, where + ": call site block '" + cs.block + "' is not one of its blocks");
        if (!jc.contains("callees") || !jc["callees"].is_array())
          fail(origin, where + ": call site without array field 'callees'");
        for (const auto& jcal : jc["callees"]) {
          if (!jcal.is_string()) fail(origin, where + ": callee names must be strings");
          cs.callees.push_back(jcal.get<std::string>());
        }
        fn.calls.push_back(std::move(cs));
      }
    }
    pg.functions.push_back(std::move(fn));
  }

  if (!pg.find_function(pg.entry_function))
    fail(origin, "entry_function '" + pg.entry_function + "' is not defined");
  for (const auto& fn : pg.functions)
    for (const auto& cs : fn.calls)
      for (const auto& callee : cs.callees)
        if (!pg.find_function(callee))
          fail(origin, "function '" + fn.name + "': unknown callee '" + callee + "'");
  return pg;
}

ProgramGraphs parse_graphs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open for reading");
  return parse_graphs(in, path);
}

Digraph call_graph(const ProgramGraphs& pg) {
  Digraph g;
  for (const auto& fn : pg.functions) g.nodes.push_back(fn.name);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& fn : pg.functions)
    for (const auto& cs : fn.calls)
      for (const auto& callee : cs.callees)
        if (seen.emplace(fn.name, callee).second)
          g.edges.emplace_back(fn.name, callee);
  return g;
}

Digraph cfg_of(const Function& fn) {
  Digraph g;
  for (const auto& b : fn.blocks) g.nodes.push_back(b.id);
  g.edges = fn.edges;
  return g;
}

Digraph icfg_view(const ProgramGraphs& pg) {
  Digraph g;
  for (const auto& fn : pg.functions) {
    for (const auto& b : fn.blocks) g.nodes.push_back(b.id);
    for (const auto& e : fn.edges) g.edges.push_back(e);
    for (const auto& cs : fn.calls)
      for (const auto& callee : cs.callees)
        g.edges.emplace_back(cs.block, pg.find_function(callee)->entry_block);
  }
  return g;
}

const BlockId& icfg_entry(const ProgramGraphs& pg) {
  return pg.find_function(pg.entry_function)->entry_block;
}

// Iterative data-flow dominator construction: process nodes in reverse
// post-order, repeatedly intersecting predecessor idoms until a fixpoint.
DominatorTree compute_dominators(const Digraph& g, const std::string& root) {
  std::unordered_map<std::string, int> id;
  id.reserve(g.nodes.size());
  for (const auto& n : g.nodes)
    if (!id.emplace(n, static_cast<int>(id.size())).second)
      throw Error("compute_dominators: duplicate node '" + n + "'");
  auto it = id.find(root);
  if (it == id.end()) throw Error("compute_dominators: root '" + root + "' is not a node");
  const int n = static_cast<int>(g.nodes.size());
  const int root_i = it->second;

  std::vector<std::vector<int>> succ(n), pred(n);
  for (const auto& [a, b] : g.edges) {
    auto ia = id.find(a), ib = id.find(b);
    if (ia == id.end() || ib == id.end())
      throw Error("compute_dominators: edge references unknown node");
    succ[ia->second].push_back(ib->second);
    pred[ib->second].push_back(ia->second);
  }

  // Reverse post-order from the root; unreachable nodes stay unordered.
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  std::function<void(int)> dfs = [&](int u) {
    visited[u] = 1;
    for (int v : succ[u])
      if (!visited[v]) dfs(v);
    order.push_back(u);
  };
  dfs(root_i);
  std::reverse(order.begin(), order.end());

  std::vector<int> rpo_num(n, -1);
  for (int i = 0; i < static_cast<int>(order.size()); ++i) rpo_num[order[i]] = i;

  constexpr int kUndef = -1;
  std::vector<int> idom(n, kUndef);
  idom[root_i] = root_i;

  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (rpo_num[a] > rpo_num[b]) a = idom[a];
      while (rpo_num[b] > rpo_num[a]) b = idom[b];
    }
    return a;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int u : order) {
      if (u == root_i) continue;
      int new_idom = kUndef;
      for (int p : pred[u]) {
        if (idom[p] == kUndef) continue;  // unreachable or not yet processed
        new_idom = (new_idom == kUndef) ? p : intersect(p, new_idom);
      }
      if (new_idom != kUndef && idom[u] != new_idom) {
        idom[u] = new_idom;
        changed = true;
      }
    }
  }

  DominatorTree t;
  t.root = root;
  for (int u = 0; u < n; ++u)
    if (idom[u] != kUndef) t.idom[g.nodes[u]] = g.nodes[idom[u]];
  return t;
}

std::vector<std::string> DominatorTree::dominators_of(const std::string& node) const {
  std::vector<std::string> chain;
  auto it = idom.find(node);
  if (it == idom.end()) return chain;
  std::string cur = node;
  while (true) {
    chain.push_back(cur);
    if (cur == root) break;
    cur = idom.at(cur);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

bool DominatorTree::dominates(const std::string& a, const std::string& b) const {
  auto it = idom.find(b);
  if (it == idom.end() || !idom.count(a)) return false;
  std::string cur = b;
  while (true) {
    if (cur == a) return true;
    if (cur == root) return false;
    cur = idom.at(cur);
  }
}

Target resolve_target(const ProgramGraphs& pg, const SourceLoc& loc) {
  std::vector<std::pair<const Function*, const CfgBlock*>> hits;
  for (const auto& fn : pg.functions)
    for (const auto& b : fn.blocks)
      for (const auto& l : b.lines)
        if (l == loc) hits.emplace_back(&fn, &b);
  std::ostringstream where;
  where << loc.file << ":" << loc.line;
  if (hits.empty()) throw Error("target " + where.str() + ": no block maps to this location");
  if (hits.size() > 1) {
    std::ostringstream msg;
    msg << "target " << where.str() << ": ambiguous, maps to blocks";
    for (const auto& [fn, b] : hits) msg << " '" << b->id << "' (" << fn->name << ")";
    throw Error(msg.str());
  }
  return Target{loc, hits[0].second->id, hits[0].first->name};
}

// Necessary blocks for one target: call-graph dominators of the target's
// function rendered as entry blocks, then CFG dominators of the target block
// within its function, de-duplicated keeping the first occurrence.
TargetSequence generate_target_sequence(const ProgramGraphs& pg, const Target& target) {
  const Function* tf = pg.find_function(target.resolved_function);
  if (!tf) throw Error("target function '" + target.resolved_function + "' is not defined");

  DominatorTree cg_dom = compute_dominators(call_graph(pg), pg.entry_function);
  std::vector<std::string> fn_chain = cg_dom.dominators_of(target.resolved_function);
  if (fn_chain.empty())
    throw Error("target function '" + target.resolved_function +
                "' is unreachable from entry function '" + pg.entry_function + "'");

  DominatorTree cfg_dom = compute_dominators(cfg_of(*tf), tf->entry_block);
  std::vector<std::string> block_chain = cfg_dom.dominators_of(target.resolved_block);
  if (block_chain.empty())
    throw Error("target block '" + target.resolved_block +
                "' is unreachable from entry block '" + tf->entry_block +
                "' of function '" + tf->name + "'");

  TargetSequence ts;
  ts.target = target;
  std::unordered_set<std::string> seen;
  for (const auto& fname : fn_chain) {
    const BlockId& entry = pg.find_function(fname)->entry_block;
    if (seen.insert(entry).second) ts.blocks.push_back(entry);
  }
  for (const auto& b : block_chain)
    if (seen.insert(b).second) ts.blocks.push_back(b);
  return ts;
}

std::vector<SourceLoc> parse_targets_file(std::istream& in, const std::string& origin) {
  std::vector<SourceLoc> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string item = line.substr(first, last - first + 1);
    auto colon = item.rfind(':');
    std::ostringstream where;
    where << origin << ":" << lineno;
    if (colon == std::string::npos || colon == 0 || colon + 1 >= item.size())
      throw Error(where.str() + ": expected 'file:line', got '" + item + "'");
    SourceLoc loc;
    loc.file = item.substr(0, colon);
    try {
      std::size_t used = 0;
      loc.line = std::stoi(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(where.str() + ": line number is not an integer in '" + item + "'");
    }
    out.push_back(std::move(loc));
  }
  return out;
}

std::vector<SourceLoc> parse_targets_path(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open for reading");
  return parse_targets_file(in, path);
}

std::vector<Target> resolve_targets(const ProgramGraphs& pg, const std::vector<SourceLoc>& locs) {
  std::vector<Target> out;
  out.reserve(locs.size());
  for (const auto& loc : locs) out.push_back(resolve_target(pg, loc));
  return out;
}

}  // namespace leofuzz
