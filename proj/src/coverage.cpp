#include "leofuzz/coverage.hpp"

#include <algorithm>

namespace leofuzz {

namespace {

// Classic O(|a|*|b|) LCS over two rows.
template <typename T>
std::size_t lcs_impl(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::size_t lcs_length(std::span<const BlockId> a, std::span<const BlockId> b) {
  return lcs_impl(a, b);
}

std::size_t lcs_length_u32(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  return lcs_impl(a, b);
}

bool CoverageMap::has_new_edge(const std::vector<std::pair<BlockId, BlockId>>& edges) const {
  for (const auto& e : edges)
    if (!seen_edges.count(e)) return true;
  return false;
}

void CoverageMap::add_edges(const std::vector<std::pair<BlockId, BlockId>>& edges) {
  seen_edges.insert(edges.begin(), edges.end());
}

double seq_cov(const ExecutionTrace& trace, const TargetSequence& ts) {
  if (ts.blocks.empty()) throw Error("seq_cov: empty target sequence");
  return static_cast<double>(lcs_length(trace.blocks, ts.blocks)) /
         static_cast<double>(ts.blocks.size());
}

int sequence_priority(std::span<const TargetSequence> all, std::size_t i, double epsilon) {
  if (i >= all.size()) throw Error("sequence_priority: index out of range");
  int count = 0;
  for (std::size_t j = 0; j < all.size(); ++j) {
    if (j == i) continue;
    std::size_t len = std::max(all[i].blocks.size(), all[j].blocks.size());
    if (len == 0) continue;
    double sim = static_cast<double>(lcs_length(all[i].blocks, all[j].blocks)) /
                 static_cast<double>(len);
    if (sim >= epsilon) ++count;
  }
  return count;
}

void update_gmaxcov(TargetSequence& ts, double cov) {
  ts.g_max_cov = std::max(ts.g_max_cov, cov);
}

SeedCoverage compute_seed_coverage(const ExecutionTrace& trace,
                                   std::span<const TargetSequence> seqs) {
  SeedCoverage c;
  c.per_sequence.reserve(seqs.size());
  for (const auto& ts : seqs) c.per_sequence.push_back(seq_cov(trace, ts));
  c.ots_index = 0;
  for (std::size_t i = 1; i < c.per_sequence.size(); ++i)
    if (c.per_sequence[i] > c.per_sequence[c.ots_index]) c.ots_index = i;
  return c;
}

Classification classify_input(const ExecutionTrace& trace,
                              std::span<const TargetSequence> seqs,
                              const CoverageMap& cov_map) {
  Classification r;
  r.cov = compute_seed_coverage(trace, seqs);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (r.cov.per_sequence[i] > seqs[i].g_max_cov) {
      r.cls = InputClass::Directed;
      return r;
    }
  }
  r.cls = cov_map.has_new_edge(trace.edge_set) ? InputClass::CoverageOnly
                                               : InputClass::Neither;
  return r;
}

std::vector<TargetSequence> generate_sequences(const ProgramGraphs& pg,
                                               const std::vector<Target>& targets,
                                               double epsilon) {
  std::vector<TargetSequence> seqs;
  seqs.reserve(targets.size());
  for (const auto& t : targets) seqs.push_back(generate_target_sequence(pg, t));
  for (std::size_t i = 0; i < seqs.size(); ++i)
    seqs[i].priority = sequence_priority(seqs, i, epsilon);
  return seqs;
}

}  // namespace leofuzz
