#pragma once
// Program graph model: call graph, per-function CFGs, dominator trees, and
// target sequence generation.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace leofuzz {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using BlockId = std::string;

struct SourceLoc {
  std::string file;
  int line = 0;
  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
  friend auto operator<=>(const SourceLoc&, const SourceLoc&) = default;
};

struct CfgBlock {
  BlockId id;
  std::vector<SourceLoc> lines;
};

struct CallSite {
  BlockId block;
  std::vector<std::string> callees;  // several callees model indirect calls
};

struct Function {
  std::string name;
  BlockId entry_block;
  std::vector<CfgBlock> blocks;
  std::vector<std::pair<BlockId, BlockId>> edges;
  std::vector<CallSite> calls;
};

struct ProgramGraphs {
  std::string entry_function;
  std::vector<Function> functions;

  const Function* find_function(const std::string& name) const;
  const Function* function_of_block(const BlockId& id) const;
  const CfgBlock* find_block(const BlockId& id) const;
};

// Generic digraph over string node ids; used for the call graph, individual
// CFGs, random test graphs, and the interprocedural block graph.
struct Digraph {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
};

struct DominatorTree {
  std::string root;
  std::map<std::string, std::string> idom;  // root maps to itself

  // Dominators of `node` in root-to-node order; empty if unreachable.
  std::vector<std::string> dominators_of(const std::string& node) const;
  bool dominates(const std::string& a, const std::string& b) const;
};

struct Target {
  SourceLoc location;
  BlockId resolved_block;
  std::string resolved_function;
};

struct TargetSequence {
  Target target;
  std::vector<BlockId> blocks;
  int priority = 0;
  double g_max_cov = 0.0;
};

ProgramGraphs parse_graphs(std::istream& in, const std::string& origin = "<stream>");
ProgramGraphs parse_graphs_file(const std::string& path);

Digraph call_graph(const ProgramGraphs& pg);
Digraph cfg_of(const Function& fn);
// Blocks plus intra-procedural edges plus call edges (call block to callee
// entry); calls do not return, which matches the executor's semantics.
Digraph icfg_view(const ProgramGraphs& pg);
const BlockId& icfg_entry(const ProgramGraphs& pg);

DominatorTree compute_dominators(const Digraph& g, const std::string& root);

Target resolve_target(const ProgramGraphs& pg, const SourceLoc& loc);
TargetSequence generate_target_sequence(const ProgramGraphs& pg, const Target& target);

std::vector<SourceLoc> parse_targets_file(std::istream& in, const std::string& origin = "<stream>");
std::vector<SourceLoc> parse_targets_path(const std::string& path);

std::vector<Target> resolve_targets(const ProgramGraphs& pg, const std::vector<SourceLoc>& locs);
std::vector<TargetSequence> generate_sequences(const ProgramGraphs& pg,
                                               const std::vector<Target>& targets,
                                               double epsilon);

}  // namespace leofuzz
