#include "geopulse/pipeline/suggest.h"

#include <sstream>

#include "geopulse/core/error.h"
#include "geopulse/pipeline/optimizer.h"

namespace geopulse::pipeline {

namespace {

std::string percent(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v * 100.0 << "%";
  return s.str();
}

}  // namespace

std::vector<Suggestion> suggest(std::span<const HistoryEntry> history, const SuggestOptions& opts) {
  std::vector<Suggestion> out;
  if (history.empty()) return out;
  const HistoryEntry& latest = history.back();
  if (!latest.run) throw Error(ErrorCode::invalid_argument, "suggest: history entry without a run record");
  const RunRecord& run = *latest.run;

  try {
    auto opt = optimize_order(run.config, &run);
    if (opt.ratio < opts.reorder_ratio) {
      Suggestion s;
      s.kind = "reorder";
      s.message = "reordering cuts expected cost to " + percent(opt.ratio) + " of the current order";
      s.change = {{"order", opt.optimized_order}};
      s.impact = {{"original_cost_ms", opt.original_cost}, {"optimized_cost_ms", opt.optimized_cost}, {"ratio", opt.ratio}};
      s.evidence = {latest.run_id};
      out.push_back(std::move(s));
    }
  } catch (const Error&) {
    // No usable cost data: nothing to say about ordering.
  }

  if (latest.metrics) {
    const EvalMetrics& cur = *latest.metrics;
    for (const auto& sw : latest.sweeps) {
      const SweepPoint* best = nullptr;
      for (const auto& p : sw.points) {
        const auto& m = p.metrics;
        bool dominates = m.precision >= cur.precision && m.recall >= cur.recall && m.reduction_rate > cur.reduction_rate;
        if (run.config.quality.min_precision) dominates = dominates && m.precision >= *run.config.quality.min_precision;
        if (run.config.quality.min_recall) dominates = dominates && m.recall >= *run.config.quality.min_recall;
        if (dominates && (!best || m.reduction_rate > best->metrics.reduction_rate)) best = &p;
      }
      if (!best) continue;
      Suggestion s;
      s.kind = "threshold";
      s.component = sw.component;
      std::ostringstream msg;
      msg << "set " << sw.component << "." << sw.param << " to " << best->value
          << ": same or better precision and recall with higher reduction";
      s.message = msg.str();
      s.change = {{"component", sw.component}, {"param", sw.param}, {"from", sw.current_value}, {"to", best->value}};
      s.impact = {{"precision", {cur.precision, best->metrics.precision}},
                  {"recall", {cur.recall, best->metrics.recall}},
                  {"reduction_rate", {cur.reduction_rate, best->metrics.reduction_rate}}};
      s.evidence = {latest.run_id};
      out.push_back(std::move(s));
    }
  }

  for (const auto& st : run.components) {
    if (st.input == 0 || st.selectivity < opts.removal_selectivity) continue;
    Suggestion s;
    s.kind = "remove";
    s.component = st.name;
    s.message = st.name + " passed " + percent(st.selectivity) + " of its input; consider removing it";
    s.change = {{"remove", st.name}};
    s.impact = {{"selectivity", st.selectivity}, {"saved_ms_per_item", st.mean_cost_ms}};
    s.evidence = {latest.run_id};
    for (auto it = history.rbegin() + 1; it != history.rend(); ++it) {
      if (!it->run) continue;
      const auto* past = it->run->stats(st.name);
      if (past && past->input > 0 && past->selectivity >= opts.removal_selectivity) s.evidence.push_back(it->run_id);
    }
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json to_json(const Suggestion& s) {
  nlohmann::json j = {{"kind", s.kind}, {"message", s.message}, {"change", s.change},
                      {"impact", s.impact}, {"evidence", s.evidence}};
  if (!s.component.empty()) j["component"] = s.component;
  return j;
}

}  // namespace geopulse::pipeline
