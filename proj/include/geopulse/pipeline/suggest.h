#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/pipeline/engine.h"
#include "geopulse/pipeline/metrics.h"
#include "geopulse/pipeline/sweep.h"

namespace geopulse::pipeline {

struct HistoryEntry {
  std::string run_id;
  const RunRecord* run = nullptr;
  std::optional<EvalMetrics> metrics;  // when a labeled sample was available
  std::vector<SweepResult> sweeps;     // sweeps made on this run's config
};

struct Suggestion {
  std::string kind;  // "reorder", "threshold", "remove"
  std::string component;  // empty for reorder
  std::string message;
  nlohmann::json change;   // proposed edit
  nlohmann::json impact;   // estimated effect
  std::vector<std::string> evidence;  // run ids
};

struct SuggestOptions {
  double reorder_ratio = 0.9;
  double removal_selectivity = 0.99;
};

// Looks at the most recent entry: reorder when optimize_order beats the
// current order by the ratio, threshold when a sweep point dominates the
// current metrics (>= precision and recall, higher reduction), removal for
// components passing nearly everything.
std::vector<Suggestion> suggest(std::span<const HistoryEntry> history, const SuggestOptions& opts = {});

nlohmann::json to_json(const Suggestion& s);

}  // namespace geopulse::pipeline
