#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/pipeline/engine.h"
#include "geopulse/pipeline/metrics.h"

namespace geopulse::pipeline {

struct SweepPoint {
  double value = 0.0;
  EvalMetrics metrics;
};

struct SweepResult {
  std::string component;
  std::string param;
  double current_value = 0.0;
  std::vector<SweepPoint> points;
};

// 0, 0.05, ..., 1 (21 points).
std::vector<double> default_grid();

// Re-evaluates the pipeline at each grid value of one parameter. Components
// upstream of the swept one run once; scores are reused across grid points.
SweepResult sweep(Engine& engine, const PipelineConfig& config, const LabeledSample& sample,
                  const std::string& component, const std::string& param, std::span<const double> grid);

nlohmann::json to_json(const SweepResult& r);

}  // namespace geopulse::pipeline
