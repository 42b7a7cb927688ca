#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace geopulse::aggregate {

// 1-based ranks, ties get the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

struct SpearmanResult {
  double rho = 0.0;
  std::vector<std::string> regions;         // compared, sorted
  std::vector<std::string> missing_from_y;  // present only in x
  std::vector<std::string> missing_from_x;  // present only in y
};

// Pearson correlation of average ranks over the regions present in both
// maps; 0 if either side is constant. Needs at least 2 common regions.
SpearmanResult spearman(const std::map<std::string, double>& x, const std::map<std::string, double>& y);

nlohmann::json to_json(const SpearmanResult& r);

}  // namespace geopulse::aggregate
