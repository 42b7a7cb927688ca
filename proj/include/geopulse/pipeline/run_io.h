#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "geopulse/geo/disambiguate.h"
#include "geopulse/pipeline/engine.h"
#include "geopulse/pipeline/metrics.h"

namespace geopulse::pipeline {

// DIR/run.jsonl        one ItemFate per line, corpus order
// DIR/summary.json     run id, config, component stats, totals, metrics
// DIR/resolutions.jsonl resolutions of kept items
void save_run(const std::filesystem::path& dir, const RunRecord& run,
              const std::optional<EvalMetrics>& metrics = std::nullopt);
RunRecord load_run(const std::filesystem::path& dir);
nlohmann::json run_summary(const RunRecord& run, const std::optional<EvalMetrics>& metrics);

std::vector<geo::GeoResolution> kept_resolutions(const RunRecord& run);
std::vector<geo::GeoResolution> load_resolutions(const std::filesystem::path& path);
void write_resolutions(std::ostream& out, std::span<const geo::GeoResolution> resolutions);

}  // namespace geopulse::pipeline
