#pragma once
// Strategy comparison harness: repeated campaigns per fixture/strategy and
// the Vargha-Delaney effect size over executions-to-all-targets.

#include "leofuzz/engine.hpp"

namespace leofuzz {

// P(x < y) + 0.5 * P(x = y): probability a draw from xs beats a draw from ys
// when lower is better. Identical samples give 0.5.
double vargha_delaney_a12(std::span<const double> xs, std::span<const double> ys);

template <typename T>
double median(std::vector<T> v);

struct BenchFixture {
  std::string name;
  std::string program_path;
  std::string targets_path;
  std::vector<Bytes> seeds;
};

struct BenchConfig {
  std::vector<Strategy> strategies{Strategy::Mes, Strategy::AflgoDistance,
                                   Strategy::SeqcovSingle};
  int runs = 10;
  int jobs = 1;
  std::uint64_t rng_seed = 1;  // run i uses rng_seed + i
  CampaignConfig base;         // budget, scheduler, and stage knobs
};

struct BenchRun {
  int run = 0;
  std::uint64_t executions = 0;
  std::uint64_t execs_to_all = 0;  // budget when not all targets were reached
  bool all_reached = false;
  std::size_t targets_reached = 0;
  std::uint64_t unique_crashes = 0;
};

struct BenchCell {
  std::string fixture;
  Strategy strategy = Strategy::Mes;
  std::vector<BenchRun> runs;

  double median_execs_to_all() const;
  std::size_t median_targets_reached() const;
  int all_reached_count() const;
};

struct BenchReport {
  std::vector<BenchCell> cells;

  const BenchCell* find(const std::string& fixture, Strategy s) const;
  // A12 of `s` against `baseline` on executions-to-all (lower is better).
  double a12(const std::string& fixture, Strategy s, Strategy baseline) const;
  std::string format_table() const;
  std::string to_json() const;
};

BenchReport run_bench(std::span<const BenchFixture> fixtures, const BenchConfig& cfg);

extern template double median<double>(std::vector<double>);
extern template double median<std::uint64_t>(std::vector<std::uint64_t>);

}  // namespace leofuzz
