#pragma once
// Seed energy scheduling: comprehensive factor, annealing temperature, energy
// integration, and the distance/coverage baseline metrics.

#include <map>
#include <span>

#include "leofuzz/coverage.hpp"

namespace leofuzz {

struct SchedulerConfig {
  double beta = 0.8;      // gMaxCov threshold in the comprehensive factor
  double epsilon = 0.5;   // sequence similarity threshold for priorities
  double alpha = 0.9;     // annealing decay constant, must lie in [0.8, 0.99]
  double t_k = 0.05;      // temperature threshold; greedy below it
  double t_x = 1.0;       // seconds until the temperature reaches t_k
  long base_energy = 16;

  void validate() const;  // throws Error on out-of-range values
};

struct EnergyDecision {
  double cf = 0.0;
  double temperature = 0.0;
  double cap = 0.0;
  long menergy = 0;
  std::size_t ots_index = 0;
};

double comprehensive_factor(double seq_cov, int priority, double g_max_cov,
                            std::span<const double> all_gmax, std::size_t n,
                            double beta);

// T = 20^(-t / t_x); T(0) = 1, T(t_x) = 0.05.
double temperature(double t, double t_x);

double capability(double cf, double temp);

// round(base * 2^((cap - 0.2) * 10)), floored at 1; round half up.
long menergy(long base, double cap);

EnergyDecision assign_energy(const SeedCoverage& cov,
                             std::span<const TargetSequence> seqs,
                             double elapsed_s, const SchedulerConfig& cfg);

// Harmonic-distance baseline. A node's distance is the harmonic mean of its
// shortest-path distances to the targets it reaches at distance >= 1; nodes
// reaching none are undefined and absent from the map.
std::map<BlockId, double> harmonic_node_distances(const ProgramGraphs& pg,
                                                  std::span<const Target> targets);

// Arithmetic mean over trace blocks with a defined distance; throws Error
// when no block in the trace has one.
double harmonic_seed_distance(std::span<const BlockId> trace_blocks,
                              const std::map<BlockId, double>& node_distances);

}  // namespace leofuzz
