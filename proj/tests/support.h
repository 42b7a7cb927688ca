#pragma once

#include <filesystem>
#include <string>

#include "geopulse/synth/synth_spec.h"

namespace geopulse::testkit {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Path of a file in the bundled data/ directory.
std::filesystem::path data_file(const std::string& name);

// Small corpus with media, one event and a few geo clusters.
synth::SynthSpec small_spec(std::uint64_t seed = 11);

}  // namespace geopulse::testkit
