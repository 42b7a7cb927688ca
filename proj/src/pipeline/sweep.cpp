#include "geopulse/pipeline/sweep.h"

#include "geopulse/core/error.h"

namespace geopulse::pipeline {

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
  return g;
}

SweepResult sweep(Engine& engine, const PipelineConfig& config, const LabeledSample& sample,
                  const std::string& component, const std::string& param, std::span<const double> grid) {
  auto idx = config.index_of(component);
  if (!idx) throw Error(ErrorCode::not_found, "sweep: no component named '" + component + "'");
  const auto& spec = config.components[*idx];
  if (!spec.params.contains(param) || !spec.params[param].is_number()) {
    throw Error(ErrorCode::validation, "sweep: component '" + component + "' has no numeric parameter '" + param + "'");
  }
  SweepResult r;
  r.component = component;
  r.param = param;
  r.current_value = spec.number(param);

  validate(config);
  RunState prefix = engine.initial_state();
  for (std::size_t i = 0; i < *idx; ++i) engine.apply(config, i, prefix);

  for (double v : grid) {
    PipelineConfig variant = with_param(config, component, param, v);
    RunState s = prefix;
    for (std::size_t i = *idx; i < variant.components.size(); ++i) engine.apply(variant, i, s);
    RunRecord run = engine.finish(variant, std::move(s));
    r.points.push_back({v, evaluate(run, sample)});
  }
  return r;
}

nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : r.points) {
    rows.push_back({{"value", p.value},
                    {"precision", p.metrics.precision},
                    {"recall", p.metrics.recall},
                    {"reduction_rate", p.metrics.reduction_rate},
                    {"kept", p.metrics.kept},
                    {"precision_undefined", p.metrics.precision_undefined},
                    {"metrics", to_json(p.metrics)}});
  }
  return {{"component", r.component}, {"param", r.param}, {"current_value", r.current_value}, {"rows", rows}};
}

}  // namespace geopulse::pipeline
