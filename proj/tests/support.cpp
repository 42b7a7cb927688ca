#include "support.h"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

#include "geopulse/core/error.h"
#include "geopulse/core/time.h"

namespace geopulse::testkit {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  auto base = std::filesystem::temp_directory_path();
  for (;;) {
    auto name = "geopulse-test-" + std::to_string(rd()) + "-" + std::to_string(counter++);
    path_ = base / name;
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(GEOPULSE_DATA_DIR) / name;
}

synth::SynthSpec small_spec(std::uint64_t seed) {
  synth::SynthSpec spec;
  spec.seed = seed;
  spec.start = parse_timestamp("2024-04-01T00:00:00Z");
  spec.duration_hours = 48;
  spec.base_rate = 6;
  spec.media_fraction = 0.6;
  spec.duplicate_fraction = 0.2;
  spec.image_width = 36;
  spec.image_height = 32;
  synth::SynthEvent ev;
  ev.event_id = "E1";
  ev.name = "test flood";
  ev.country = "IT";
  ev.country_name = "Italy";
  ev.start = parse_timestamp("2024-04-01T12:00:00Z");
  ev.end = parse_timestamp("2024-04-02T06:00:00Z");
  ev.term_boost = {{"flood", 20.0}, {"rain", 8.0}};
  ev.extra_rate = 10;
  ev.center = {45.4, 11.9};
  ev.affected = 1000;
  spec.events.push_back(ev);
  return spec;
}

}  // namespace geopulse::testkit
