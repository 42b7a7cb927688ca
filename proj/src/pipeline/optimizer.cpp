#include "geopulse/pipeline/optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "geopulse/core/error.h"
#include "geopulse/pipeline/engine.h"

namespace geopulse::pipeline {

double expected_cost(std::span<const CostEntry> order) {
  double total = 0.0;
  double reach = 1.0;
  for (const auto& c : order) {
    total += c.cost_ms * reach;
    reach *= c.selectivity;
  }
  return total;
}

namespace {

double cost_of(const OrderProblem& p, const std::vector<std::size_t>& order) {
  std::vector<CostEntry> seq;
  seq.reserve(order.size());
  for (auto i : order) seq.push_back(p.items[i]);
  return expected_cost(seq);
}

bool respects(const OrderProblem& p, const std::vector<std::size_t>& order) {
  std::vector<std::size_t> pos(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
  for (auto [a, b] : p.before) {
    if (pos[a] > pos[b]) return false;
  }
  return true;
}

double rank(const CostEntry& c) {
  if (c.selectivity >= 1.0) return std::numeric_limits<double>::infinity();
  return c.cost_ms / (1.0 - c.selectivity);
}

}  // namespace

OrderSolution solve_order(const OrderProblem& p, std::size_t exhaustive_limit) {
  const std::size_t n = p.items.size();
  std::vector<bool> pinned = p.pinned;
  pinned.resize(n, false);
  std::vector<std::size_t> free_items, free_slots;
  for (std::size_t i = 0; i < n; ++i) {
    if (!pinned[i]) {
      free_items.push_back(i);
      free_slots.push_back(i);
    }
  }
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);

  OrderSolution best;
  if (free_items.size() <= exhaustive_limit) {
    best.method = "exhaustive";
    best.cost = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> perm = free_items;
    do {
      std::vector<std::size_t> order = identity;
      for (std::size_t k = 0; k < perm.size(); ++k) order[free_slots[k]] = perm[k];
      if (!respects(p, order)) continue;
      double c = cost_of(p, order);
      if (c < best.cost) {
        best.cost = c;
        best.order = order;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best.order.empty() && n > 0) {
      throw Error(ErrorCode::validation, "no component order satisfies the precedence and pinning constraints");
    }
    if (n == 0) best.cost = 0.0;
    return best;
  }

  best.method = "rank";
  std::vector<bool> placed(n, false);
  for (std::size_t slot = 0; slot < n; ++slot) {
    std::size_t chosen = n;
    if (pinned[slot]) {
      chosen = slot;
    } else {
      for (auto i : free_items) {
        if (placed[i]) continue;
        bool ready = true;
        for (auto [a, b] : p.before) ready = ready && !(b == i && !placed[a]);
        if (!ready) continue;
        if (chosen == n) {
          chosen = i;
          continue;
        }
        double ri = rank(p.items[i]), rc = rank(p.items[chosen]);
        if (ri < rc || (ri == rc && p.items[i].name < p.items[chosen].name)) chosen = i;
      }
    }
    if (chosen == n) throw Error(ErrorCode::validation, "no component order satisfies the precedence and pinning constraints");
    placed[chosen] = true;
    best.order.push_back(chosen);
  }
  if (!respects(p, best.order)) {
    throw Error(ErrorCode::validation, "no component order satisfies the precedence and pinning constraints");
  }
  best.cost = cost_of(p, best.order);
  return best;
}

OptimizeResult optimize_order(const PipelineConfig& config, const RunRecord* profile, std::size_t exhaustive_limit) {
  OptimizeResult r;
  OrderProblem p;
  for (const auto& c : config.components) {
    CostEntry e;
    e.name = c.name;
    const ComponentStats* measured = profile ? profile->stats(c.name) : nullptr;
    auto declared = config.cost_model.find(c.name);
    if (measured && measured->input > 0) {
      e.cost_ms = measured->mean_cost_ms;
      e.selectivity = measured->selectivity;
      r.cost_sources.push_back("measured");
    } else if (declared != config.cost_model.end() && declared->second.selectivity) {
      e.cost_ms = declared->second.cost_ms;
      e.selectivity = *declared->second.selectivity;
      r.cost_sources.push_back("declared");
    } else {
      throw Error(ErrorCode::validation,
                  "no cost data for component '" + c.name +
                      "': run the pipeline first to profile it, or declare cost_ms and selectivity in cost_model");
    }
    p.items.push_back(e);
    p.pinned.push_back(c.pinned);
    r.original_order.push_back(c.name);
  }
  p.before = config.precedence_pairs();
  auto sol = solve_order(p, exhaustive_limit);
  r.costs = p.items;
  r.original_cost = expected_cost(p.items);
  r.optimized_cost = sol.cost;
  r.ratio = r.original_cost > 0.0 ? r.optimized_cost / r.original_cost : 1.0;
  r.method = sol.method;
  for (auto i : sol.order) r.optimized_order.push_back(p.items[i].name);
  r.config = reordered(config, r.optimized_order);
  return r;
}

nlohmann::json to_json(const OptimizeResult& r) {
  nlohmann::json costs = nlohmann::json::array();
  for (std::size_t i = 0; i < r.costs.size(); ++i) {
    costs.push_back({{"name", r.costs[i].name},
                     {"cost_ms", r.costs[i].cost_ms},
                     {"selectivity", r.costs[i].selectivity},
                     {"source", r.cost_sources[i]}});
  }
  return {{"config", to_json(r.config)},
          {"original_order", r.original_order},
          {"optimized_order", r.optimized_order},
          {"costs", costs},
          {"original_cost", r.original_cost},
          {"optimized_cost", r.optimized_cost},
          {"ratio", r.ratio},
          {"method", r.method}};
}

}  // namespace geopulse::pipeline
