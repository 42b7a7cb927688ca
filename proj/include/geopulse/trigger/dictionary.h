#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/core/events.h"
#include "geopulse/trigger/term_series.h"

namespace geopulse::trigger {

struct LearnedTerm {
  std::string term;
  double score = 0.0;
  std::int64_t frequency = 0;

  friend bool operator==(const LearnedTerm&, const LearnedTerm&) = default;
};

struct DictionaryOptions {
  std::size_t k = 25;
  std::int64_t min_freq = 50;
  double min_corr = 0.3;
  Seconds bucket_width{3600};
};

struct Dictionary {
  std::string language;
  std::vector<std::string> seeds;
  std::vector<LearnedTerm> learned;  // score descending, ties by term
  DictionaryOptions options;

  // Seeds first, then learned terms not already seeded.
  std::vector<std::string> terms() const;
};

Dictionary build_dictionary(std::span<const TokenizedPost> posts, std::span<const EventRecord> events,
                            const std::string& language, std::span<const std::string> seeds,
                            const DictionaryOptions& opts = {});
Dictionary build_dictionary(std::span<const Post> posts, std::span<const EventRecord> events,
                            const std::string& language, std::span<const std::string> seeds,
                            const DictionaryOptions& opts = {});

nlohmann::json to_json(const Dictionary& d);
Dictionary dictionary_from_json(const nlohmann::json& j);
void save_dictionary(const std::filesystem::path& path, const Dictionary& d);
Dictionary load_dictionary(const std::filesystem::path& path);

}  // namespace geopulse::trigger
