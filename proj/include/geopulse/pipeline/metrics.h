#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/core/sample.h"
#include "geopulse/pipeline/engine.h"

namespace geopulse::pipeline {

struct ComponentMetrics {
  std::string name;
  std::string component_id;
  std::size_t input = 0;
  std::size_t passed = 0;
  double selectivity = 1.0;
  double mean_cost_ms = 0.0;
};

struct EvalMetrics {
  double precision = 1.0;
  double recall = 1.0;
  double reduction_rate = 0.0;
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t removed = 0;
  std::size_t labeled = 0;
  std::size_t relevant = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool precision_undefined = false;  // no labeled item kept; precision reported as 1
  bool recall_undefined = false;     // no relevant item labeled; recall reported as 1
  std::vector<ComponentMetrics> components;
  double expected_cost_per_item = 0.0;  // ms, from measured costs and selectivities
};

// Unlabeled items count toward reduction only.
EvalMetrics evaluate(const RunRecord& run, const LabeledSample& sample);

nlohmann::json to_json(const EvalMetrics& m);

// Only the quality fields, for comparing runs whose timings differ.
bool same_quality(const EvalMetrics& a, const EvalMetrics& b);

}  // namespace geopulse::pipeline
