#include "geopulse/aggregate/spearman.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geopulse/core/error.h"

namespace geopulse::aggregate {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(const std::map<std::string, double>& x, const std::map<std::string, double>& y) {
  SpearmanResult r;
  std::vector<double> xs, ys;
  for (const auto& [id, v] : x) {
    auto it = y.find(id);
    if (it == y.end()) {
      r.missing_from_y.push_back(id);
      continue;
    }
    r.regions.push_back(id);
    xs.push_back(v);
    ys.push_back(it->second);
  }
  for (const auto& [id, _] : y) {
    if (!x.count(id)) r.missing_from_x.push_back(id);
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "spearman: need at least 2 regions present on both sides, got " +
                                                 std::to_string(xs.size()));
  }
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  r.rho = (sxx == 0 || syy == 0) ? 0.0 : std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return r;
}

nlohmann::json to_json(const SpearmanResult& r) {
  return {{"rho", r.rho},
          {"regions", r.regions},
          {"missing_from_reference", r.missing_from_y},
          {"missing_from_output", r.missing_from_x}};
}

}  // namespace geopulse::aggregate
