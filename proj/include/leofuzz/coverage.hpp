#pragma once
// Target sequence coverage metrics and input classification.

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>

#include "leofuzz/graphs.hpp"

namespace leofuzz {

struct ExecutionTrace {
  // Blocks in visit order, filtered to instrumented (sequence member) blocks.
  std::vector<BlockId> blocks;
  // Sorted unique edges over the full, unfiltered trace.
  std::vector<std::pair<BlockId, BlockId>> edge_set;
};

struct CoverageMap {
  std::set<std::pair<BlockId, BlockId>> seen_edges;

  bool has_new_edge(const std::vector<std::pair<BlockId, BlockId>>& edges) const;
  void add_edges(const std::vector<std::pair<BlockId, BlockId>>& edges);
};

struct SeedCoverage {
  std::vector<double> per_sequence;
  std::size_t ots_index = 0;  // smallest index attaining the maximum

  double ots_cov() const {
    return per_sequence.empty() ? 0.0 : per_sequence[ots_index];
  }
};

enum class InputClass { Directed, CoverageOnly, Neither };

struct Classification {
  InputClass cls = InputClass::Neither;
  SeedCoverage cov;
};

std::size_t lcs_length(std::span<const BlockId> a, std::span<const BlockId> b);
std::size_t lcs_length_u32(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

// LCS(trace, ts) / len(ts).
double seq_cov(const ExecutionTrace& trace, const TargetSequence& ts);

// Number of other sequences j with LCS(ts_i, ts_j)/max(len_i, len_j) >= epsilon.
int sequence_priority(std::span<const TargetSequence> all, std::size_t i, double epsilon);

void update_gmaxcov(TargetSequence& ts, double cov);

SeedCoverage compute_seed_coverage(const ExecutionTrace& trace,
                                   std::span<const TargetSequence> seqs);

// Directed: some sequence's coverage strictly exceeds its global max.
// CoverageOnly: no sequence improves but the trace holds an unseen edge.
// Directed takes precedence; the caller applies gMaxCov/coverage updates.
Classification classify_input(const ExecutionTrace& trace,
                              std::span<const TargetSequence> seqs,
                              const CoverageMap& cov_map);

}  // namespace leofuzz
