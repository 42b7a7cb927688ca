#include "geopulse/pipeline/run_io.h"

#include <fstream>
#include <sstream>

#include "geopulse/core/error.h"

namespace geopulse::pipeline {

using nlohmann::json;

nlohmann::json run_summary(const RunRecord& run, const std::optional<EvalMetrics>& metrics) {
  json comps = json::array();
  for (const auto& s : run.components) comps.push_back(to_json(s));
  json j = {{"run_id", run.run_id},
            {"config", to_json(run.config)},
            {"total", run.total()},
            {"kept", run.kept_count()},
            {"components", comps},
            {"warnings", run.warnings}};
  j["metrics"] = metrics ? to_json(*metrics) : json(nullptr);
  return j;
}

std::vector<geo::GeoResolution> kept_resolutions(const RunRecord& run) {
  std::vector<geo::GeoResolution> out;
  for (const auto& f : run.items) {
    if (f.kept() && f.resolution) out.push_back(*f.resolution);
  }
  return out;
}

void write_resolutions(std::ostream& out, std::span<const geo::GeoResolution> resolutions) {
  for (const auto& r : resolutions) out << geo::to_json(r).dump() << '\n';
}

void save_run(const std::filesystem::path& dir, const RunRecord& run, const std::optional<EvalMetrics>& metrics) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("run.jsonl");
    for (const auto& f : run.items) out << to_json(f).dump() << '\n';
  }
  {
    auto out = open("resolutions.jsonl");
    write_resolutions(out, kept_resolutions(run));
  }
  auto out = open("summary.json");
  out << run_summary(run, metrics).dump(2) << '\n';
}

RunRecord load_run(const std::filesystem::path& dir) {
  std::ifstream summary(dir / "summary.json", std::ios::binary);
  if (!summary) throw Error(ErrorCode::not_found, "no run summary in " + dir.string());
  RunRecord run;
  try {
    json j = json::parse(summary);
    run.run_id = j.value("run_id", std::string{});
    run.config = parse_config_json(j.at("config"));
    for (const auto& c : j.at("components")) run.components.push_back(stats_from_json(c));
    run.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "malformed run summary in " + dir.string() + ": " + e.what());
  }
  std::ifstream items(dir / "run.jsonl", std::ios::binary);
  if (!items) throw Error(ErrorCode::not_found, "no run.jsonl in " + dir.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(items, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      run.items.push_back(fate_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, "run.jsonl line " + std::to_string(n) + ": " + e.what());
    }
  }
  return run;
}

std::vector<geo::GeoResolution> load_resolutions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::not_found, "resolutions file not found: " + path.string());
  std::vector<geo::GeoResolution> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(geo::resolution_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, path.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace geopulse::pipeline
