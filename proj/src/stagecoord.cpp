#include "leofuzz/stagecoord.hpp"

#include <algorithm>
#include <cmath>

namespace leofuzz {

StageState make_stage_state(const StageConfig& cfg, double now) {
  StageState st;
  st.cfg = cfg;
  st.rate = cfg.rate_init;
  st.stage_started_at = now;
  return st;
}

double exploitation_threshold(const StageState& st) {
  const double raw = 0.5 * static_cast<double>(st.slndc + st.lndc) *
                     std::sqrt(static_cast<double>(st.epoch));
  return std::max(st.cfg.th_min, raw);
}

double update_rate(const StageState& st, double now) {
  const double t = std::max(1.0, std::floor(now - st.stage_started_at));
  const double arg = (static_cast<double>(st.cdsc) / std::sqrt(t)) *
                     std::sqrt(static_cast<double>(st.epoch));
  const double next = st.rate - st.cfg.gamma * (std::tanh(arg) - st.cfg.delta);
  return std::clamp(next, 0.0, 1.0);
}

StageEvent stage_coord(StageState& st, double now) {
  if (st.sof == 0) {
    const long total = st.csc + st.dsc;
    if (total > 0 &&
        static_cast<double>(st.csc) / static_cast<double>(total) > st.rate) {
      st.sof = 1;
      st.ndc = 0;
      st.cdsc = 0;
      st.epoch += 1;
      st.stage_started_at = now;
      return StageEvent::ToExploitation;
    }
    return StageEvent::None;
  }
  if (static_cast<double>(st.ndc) >= exploitation_threshold(st)) {
    st.rate = update_rate(st, now);
    st.slndc = st.lndc;
    st.lndc = st.ndc;
    st.sof = 0;
    st.stage_started_at = now;
    return StageEvent::ToExploration;
  }
  return StageEvent::None;
}

void record_execution_outcome(StageState& st, InputClass cls) {
  switch (cls) {
    case InputClass::Directed:
      st.dsc += 1;
      st.cdsc += 1;
      st.ndc = 0;
      break;
    case InputClass::CoverageOnly:
      st.csc += 1;
      st.ndc += 1;
      break;
    case InputClass::Neither:
      st.ndc += 1;
      break;
  }
}

}  // namespace leofuzz
