#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "geopulse/pipeline/config.h"

namespace geopulse::pipeline {

struct RunRecord;

struct CostEntry {
  std::string name;
  double cost_ms = 0.0;
  double selectivity = 1.0;
};

// sum_i c_i * prod_{j<i} s_j over the given order.
double expected_cost(std::span<const CostEntry> order);

struct OrderProblem {
  std::vector<CostEntry> items;                         // original order
  std::vector<std::pair<std::size_t, std::size_t>> before;  // (a, b): a runs before b
  std::vector<bool> pinned;                             // keeps its original slot
};

struct OrderSolution {
  std::vector<std::size_t> order;  // indices into items
  double cost = 0.0;
  std::string method;  // "exhaustive" or "rank"
};

// Exhaustive over permutations of the free items when there are at most
// exhaustive_limit of them, otherwise greedy by c/(1-s) (s=1 last, ties by
// name) among the items whose predecessors are placed.
OrderSolution solve_order(const OrderProblem& problem, std::size_t exhaustive_limit = 8);

struct OptimizeResult {
  PipelineConfig config;  // reordered
  std::vector<std::string> original_order;
  std::vector<std::string> optimized_order;
  std::vector<CostEntry> costs;  // original order
  std::vector<std::string> cost_sources;  // "measured" or "declared", parallel to costs
  double original_cost = 0.0;
  double optimized_cost = 0.0;
  double ratio = 1.0;  // optimized / original
  std::string method;
};

// Costs come from the profiled run when given, else from the declared cost
// model. Missing data throws Error(validation).
OptimizeResult optimize_order(const PipelineConfig& config, const RunRecord* profile = nullptr,
                              std::size_t exhaustive_limit = 8);

nlohmann::json to_json(const OptimizeResult& r);

}  // namespace geopulse::pipeline
