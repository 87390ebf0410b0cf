#pragma once
// Simulated program: a predicate-labeled ICFG executed deterministically on
// input bytes, plus the branch solver used by the concolic worker.

#include <cstdint>
#include <optional>

#include "leofuzz/coverage.hpp"

namespace leofuzz {

using Bytes = std::vector<std::uint8_t>;

enum class PredicateKind { ByteEq, ByteLt, MagicBytes, LengthGe, Always };

struct Predicate {
  PredicateKind kind = PredicateKind::Always;
  std::size_t offset = 0;
  Bytes bytes;             // comparison bytes for byte_eq / byte_lt / magic_bytes
  std::size_t length = 0;  // required length for length_ge

  // Out-of-range reads evaluate to false.
  bool eval(const Bytes& input) const;
};

struct SimProgram {
  ProgramGraphs graphs;
  std::size_t max_steps = 4096;

  // Compiled form: block ids interned to dense indices, successor lists with
  // predicate edges in file order and the default edge last.
  std::vector<BlockId> block_ids;
  std::map<BlockId, std::uint32_t> block_index;

  struct OutEdge {
    std::uint32_t to = 0;
    std::uint32_t edge_id = 0;
    Predicate pred;
    bool has_pred = false;
    bool is_default = false;
  };
  std::vector<std::vector<OutEdge>> succ;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_pairs;  // by edge_id
  std::vector<bool> is_crash_block;
  std::vector<bool> instrumented;  // sequence members; set_instrumented()
  std::uint32_t entry = 0;

  std::uint32_t index_of(const BlockId& id) const;  // throws Error if unknown
  void set_instrumented(std::span<const TargetSequence> seqs);
};

// Engine-facing result over dense indices; buffers are reused across calls.
struct RawExecResult {
  std::vector<std::uint32_t> raw_blocks;
  std::vector<std::uint32_t> filtered;   // instrumented subsequence of raw
  std::vector<std::uint32_t> edge_ids;   // sorted unique
  std::optional<std::uint32_t> crashed_at;
  std::size_t steps = 0;
  bool hit_step_limit = false;
};

struct ExecResult {
  ExecutionTrace trace;
  std::optional<BlockId> crashed_at;
  std::size_t steps = 0;
  bool hit_step_limit = false;
};

SimProgram load_program(std::istream& in, const std::string& origin = "<stream>");
SimProgram load_program_file(const std::string& path);

void execute_into(const SimProgram& prog, const Bytes& input, RawExecResult& out);
ExecResult execute(const SimProgram& prog, const Bytes& input);

// Minimal rewrite of `seed` that satisfies the predicate on edge from->to:
// overwrite at the predicate offset, zero-pad when the seed is short, value-1
// for byte_lt. Returns nullopt for always/default edges, byte_lt 0, or an
// unknown edge.
std::optional<Bytes> solve_branch(const SimProgram& prog, const Bytes& seed,
                                  const BlockId& from, const BlockId& to);

}  // namespace leofuzz
