#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_set>

namespace geopulse {

struct LabeledSample {
  std::string sample_id;
  std::map<std::string, bool> labels;  // post_id -> relevant

  std::size_t size() const { return labels.size(); }
};

// Every labeled post must be in `known_post_ids`; otherwise Error(validation)
// listing the missing ids.
LabeledSample load_sample(std::istream& in, const std::unordered_set<std::string>& known_post_ids,
                          std::string sample_id = "sample");
LabeledSample load_sample(const std::filesystem::path& path,
                          const std::unordered_set<std::string>& known_post_ids);

void write_sample(std::ostream& out, const LabeledSample& sample);

}  // namespace geopulse
