#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/core/polygon.h"
#include "geopulse/core/time.h"

namespace geopulse {

struct MediaRef {
  std::string media_id;
  std::string path;  // relative to the corpus media directory

  friend bool operator==(const MediaRef&, const MediaRef&) = default;
};

struct Post {
  std::string id;
  Timestamp created_at{};
  std::string lang = "und";
  std::string text;
  std::vector<MediaRef> media;
  std::optional<GeoPoint> native_geo;
  bool is_repost = false;

  friend bool operator==(const Post&, const Post&) = default;
};

struct ParseDiagnostic {
  std::size_t line = 0;
  std::string reason;
};

struct ParseOptions {
  // Reposts duplicate evidence and are dropped unless asked otherwise.
  bool exclude_reposts = true;
};

struct ParseResult {
  std::vector<Post> posts;
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t excluded_reposts = 0;
};

ParseResult parse_posts(std::istream& in, const ParseOptions& options = {});
ParseResult parse_posts_file(const std::filesystem::path& path,
                             const ParseOptions& options = {});

nlohmann::json to_json(const Post& post);
// Throws Error(validation) with the diagnostic reason.
Post post_from_json(const nlohmann::json& j);

void write_posts(std::ostream& out, std::span<const Post> posts);

// Lexical check: relative, no "..", no root. Corpus media must stay inside
// the media directory.
bool is_contained_relative_path(const std::string& path);

bool valid_language_code(const std::string& lang);

}  // namespace geopulse
