#include "geopulse/pipeline/metrics.h"

#include "geopulse/pipeline/optimizer.h"

namespace geopulse::pipeline {

EvalMetrics evaluate(const RunRecord& run, const LabeledSample& sample) {
  EvalMetrics m;
  m.total = run.total();
  for (const auto& f : run.items) {
    if (f.kept()) ++m.kept;
    auto it = sample.labels.find(f.post_id);
    if (it == sample.labels.end()) continue;
    ++m.labeled;
    bool relevant = it->second;
    if (relevant) ++m.relevant;
    if (f.kept() && relevant) ++m.tp;
    else if (f.kept()) ++m.fp;
    else if (relevant) ++m.fn;
    else ++m.tn;
  }
  m.removed = m.total - m.kept;
  m.reduction_rate = m.total == 0 ? 0.0 : 1.0 - static_cast<double>(m.kept) / static_cast<double>(m.total);
  m.precision_undefined = m.tp + m.fp == 0;
  m.precision = m.precision_undefined ? 1.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  m.recall_undefined = m.tp + m.fn == 0;
  m.recall = m.recall_undefined ? 1.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);

  std::vector<CostEntry> order;
  for (const auto& s : run.components) {
    m.components.push_back({s.name, s.component_id, s.input, s.passed, s.selectivity, s.mean_cost_ms});
    order.push_back({s.name, s.mean_cost_ms, s.selectivity});
  }
  m.expected_cost_per_item = expected_cost(order);
  return m;
}

nlohmann::json to_json(const EvalMetrics& m) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : m.components) {
    comps.push_back({{"name", c.name},
                     {"component_id", c.component_id},
                     {"input", c.input},
                     {"passed", c.passed},
                     {"selectivity", c.selectivity},
                     {"mean_cost_ms", c.mean_cost_ms}});
  }
  return {{"precision", m.precision},
          {"recall", m.recall},
          {"reduction_rate", m.reduction_rate},
          {"total", m.total},
          {"kept", m.kept},
          {"removed", m.removed},
          {"labeled", m.labeled},
          {"relevant", m.relevant},
          {"confusion", {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}}},
          {"precision_undefined", m.precision_undefined},
          {"recall_undefined", m.recall_undefined},
          {"kept_zero", m.kept == 0},
          {"components", comps},
          {"expected_cost_per_item_ms", m.expected_cost_per_item}};
}

bool same_quality(const EvalMetrics& a, const EvalMetrics& b) {
  return a.precision == b.precision && a.recall == b.recall && a.reduction_rate == b.reduction_rate &&
         a.total == b.total && a.kept == b.kept && a.tp == b.tp && a.fp == b.fp && a.fn == b.fn && a.tn == b.tn;
}

}  // namespace geopulse::pipeline
