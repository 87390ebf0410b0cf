#pragma once
// Exploration/exploitation stage coordination.

#include "leofuzz/coverage.hpp"

namespace leofuzz {

struct StageConfig {
  double rate_init = 0.8;
  double gamma = 0.1;
  double delta = 0.5;
  double th_min = 100.0;  // floor for the exploitation-exit threshold
};

enum class StageEvent { None, ToExploitation, ToExploration };

struct StageState {
  StageConfig cfg;
  int sof = 0;       // 0 = exploration (CQ), 1 = exploitation (DQ)
  long dsc = 10;     // directed seeds counted, bootstrapped to 10
  long csc = 0;      // coverage seeds counted
  long ndc = 0;      // consecutive executions without a directed seed
  long cdsc = 0;     // directed seeds found in the current exploitation stage
  long epoch = 0;    // completed switches into exploitation
  long lndc = 0;     // ndc recorded when the last exploitation stage ended
  long slndc = 0;    // lndc one stage earlier
  double rate = 0.8;
  double stage_started_at = 0.0;  // seconds, campaign clock
};

StageState make_stage_state(const StageConfig& cfg, double now);

// max(th_min, (slndc + lndc) / 2 * sqrt(epoch)).
double exploitation_threshold(const StageState& st);

// clamp(rate - gamma * (tanh(cdsc / sqrt(t) * sqrt(epoch)) - delta), 0, 1)
// with t = max(1, floor(now - stage_started_at)) whole seconds.
double update_rate(const StageState& st, double now);

// Evaluates the switch conditions and mutates st accordingly.
StageEvent stage_coord(StageState& st, double now);

// Directed: dsc++, cdsc++, ndc = 0. CoverageOnly: csc++, ndc++. Neither: ndc++.
void record_execution_outcome(StageState& st, InputClass cls);

}  // namespace leofuzz
