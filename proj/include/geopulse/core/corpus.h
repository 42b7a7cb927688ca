#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "geopulse/core/post.h"

namespace geopulse {

// On-disk layout:
//   DIR/posts.jsonl   DIR/media/*.pgm   DIR/events.csv   DIR/sample.csv
//   DIR/gazetteer.csv DIR/regions.csv   DIR/impact.csv
// Only posts.jsonl is required.
struct Corpus {
  std::filesystem::path root;
  std::vector<Post> posts;
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t excluded_reposts = 0;

  std::filesystem::path media_dir() const { return root / "media"; }
  std::filesystem::path media_path(const MediaRef& ref) const { return media_dir() / ref.path; }
  std::filesystem::path file(const std::string& name) const { return root / name; }

  std::unordered_set<std::string> post_ids() const;
  const Post* find(const std::string& id) const;
};

Corpus load_corpus(const std::filesystem::path& dir, const ParseOptions& options = {});

// Indices of `posts` ordered by (created_at, id).
std::vector<std::size_t> chronological_order(const std::vector<Post>& posts);

}  // namespace geopulse
