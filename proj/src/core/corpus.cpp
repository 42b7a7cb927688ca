#include "geopulse/core/corpus.h"

#include <algorithm>
#include <numeric>

#include "geopulse/core/error.h"

namespace geopulse {

std::unordered_set<std::string> Corpus::post_ids() const {
  std::unordered_set<std::string> ids;
  ids.reserve(posts.size());
  for (const auto& p : posts) ids.insert(p.id);
  return ids;
}

const Post* Corpus::find(const std::string& id) const {
  for (const auto& p : posts) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

Corpus load_corpus(const std::filesystem::path& dir, const ParseOptions& options) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::not_found, "corpus directory not found: " + dir.string());
  }
  auto posts_path = dir / "posts.jsonl";
  if (!std::filesystem::exists(posts_path)) {
    throw Error(ErrorCode::not_found, "corpus has no posts.jsonl: " + dir.string());
  }
  auto parsed = parse_posts_file(posts_path, options);
  Corpus c;
  c.root = dir;
  c.posts = std::move(parsed.posts);
  c.diagnostics = std::move(parsed.diagnostics);
  c.excluded_reposts = parsed.excluded_reposts;
  return c;
}

std::vector<std::size_t> chronological_order(const std::vector<Post>& posts) {
  std::vector<std::size_t> order(posts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (posts[a].created_at != posts[b].created_at) {
      return posts[a].created_at < posts[b].created_at;
    }
    return posts[a].id < posts[b].id;
  });
  return order;
}

}  // namespace geopulse
