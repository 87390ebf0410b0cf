#include "leofuzz/scheduler.hpp"

#include <cmath>
#include <deque>
#include <unordered_map>

namespace leofuzz {

void SchedulerConfig::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw Error("scheduler: beta must be in (0, 1]");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error("scheduler: epsilon must be in (0, 1]");
  if (!(alpha >= 0.8 && alpha <= 0.99)) throw Error("scheduler: alpha must be in [0.8, 0.99]");
  if (!(t_k > 0.0 && t_k < 1.0)) throw Error("scheduler: t_k must be in (0, 1)");
  if (!(t_x > 0.0)) throw Error("scheduler: t_x must be positive");
  if (base_energy < 1) throw Error("scheduler: base_energy must be at least 1");
}

double comprehensive_factor(double seq_cov, int priority, double g_max_cov,
                            std::span<const double> all_gmax, std::size_t n,
                            double beta) {
  if (n == 0) throw Error("comprehensive_factor: no sequences");
  std::size_t count = 0;
  for (double g : all_gmax)
    if (g >= beta) ++count;
  const double pr = static_cast<double>(priority) / static_cast<double>(n);
  // 2*count >= n keeps the half-way comparison exact in integers; the
  // boundary goes to the saturation-aware branch.
  if (2 * count >= n) return (seq_cov + pr + (1.0 - g_max_cov)) / 3.0;
  return (seq_cov + pr) / 2.0;
}

double temperature(double t, double t_x) {
  if (!(t_x > 0.0)) throw Error("temperature: t_x must be positive");
  if (t < 0.0) t = 0.0;
  return std::pow(20.0, -t / t_x);
}

double capability(double cf, double temp) {
  return cf * (1.0 - temp) + 0.5 * temp;
}

long menergy(long base, double cap) {
  const double raw = static_cast<double>(base) * std::exp2((cap - 0.2) * 10.0);
  const double rounded = std::floor(raw + 0.5);  // half up
  return rounded < 1.0 ? 1L : static_cast<long>(rounded);
}

EnergyDecision assign_energy(const SeedCoverage& cov,
                             std::span<const TargetSequence> seqs,
                             double elapsed_s, const SchedulerConfig& cfg) {
  if (seqs.empty() || cov.per_sequence.size() != seqs.size())
    throw Error("assign_energy: coverage vector does not match the sequence set");
  EnergyDecision d;
  d.ots_index = cov.ots_index;
  std::vector<double> all_gmax;
  all_gmax.reserve(seqs.size());
  for (const auto& ts : seqs) all_gmax.push_back(ts.g_max_cov);
  const TargetSequence& ots = seqs[d.ots_index];
  d.cf = comprehensive_factor(cov.ots_cov(), ots.priority, ots.g_max_cov,
                              all_gmax, seqs.size(), cfg.beta);
  d.temperature = temperature(elapsed_s, cfg.t_x);
  d.cap = capability(d.cf, d.temperature);
  d.menergy = menergy(cfg.base_energy, d.cap);
  return d;
}

std::map<BlockId, double> harmonic_node_distances(const ProgramGraphs& pg,
                                                  std::span<const Target> targets) {
  Digraph g = icfg_view(pg);
  std::unordered_map<std::string, int> id;
  id.reserve(g.nodes.size());
  for (const auto& n : g.nodes) id.emplace(n, static_cast<int>(id.size()));
  const int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<int>> pred(n);
  for (const auto& [a, b] : g.edges) pred[id.at(b)].push_back(id.at(a));

  // One reverse BFS per target gives every node's shortest distance to it.
  std::vector<double> inv_sum(n, 0.0);
  std::vector<int> reach_count(n, 0);
  for (const auto& t : targets) {
    auto it = id.find(t.resolved_block);
    if (it == id.end())
      throw Error("harmonic_node_distances: target block '" + t.resolved_block +
                  "' is not in the graph");
    std::vector<int> dist(n, -1);
    std::deque<int> q;
    dist[it->second] = 0;
    q.push_back(it->second);
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int p : pred[u])
        if (dist[p] < 0) {
          dist[p] = dist[u] + 1;
          q.push_back(p);
        }
    }
    for (int u = 0; u < n; ++u)
      if (dist[u] >= 1) {
        inv_sum[u] += 1.0 / dist[u];
        ++reach_count[u];
      }
  }

  std::map<BlockId, double> out;
  for (int u = 0; u < n; ++u)
    if (reach_count[u] > 0) out[g.nodes[u]] = reach_count[u] / inv_sum[u];
  return out;
}

double harmonic_seed_distance(std::span<const BlockId> trace_blocks,
                              const std::map<BlockId, double>& node_distances) {
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& b : trace_blocks) {
    auto it = node_distances.find(b);
    if (it != node_distances.end()) {
      sum += it->second;
      ++defined;
    }
  }
  if (defined == 0) throw Error("harmonic_seed_distance: trace has no node with a defined distance");
  return sum / static_cast<double>(defined);
}

}  // namespace leofuzz
