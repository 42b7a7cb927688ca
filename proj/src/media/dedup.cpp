#include "geopulse/media/dedup.h"

#include <algorithm>
#include <numeric>

#include "geopulse/core/error.h"

namespace geopulse::media {

DedupResult dedup(std::span<const DedupItem> items, int max_distance) {
  if (max_distance < 0 || max_distance > 64) {
    throw Error(ErrorCode::invalid_argument, "max_distance must be in [0,64]");
  }
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].created_at != items[b].created_at) return items[a].created_at < items[b].created_at;
    return items[a].id < items[b].id;
  });

  struct KeptHash {
    PerceptualHash hash;
    std::size_t item;
  };
  std::vector<KeptHash> kept_hashes;
  DedupResult result;

  for (std::size_t idx : order) {
    const auto& item = items[idx];
    if (!item.undecodable) {
      int best = max_distance + 1;
      std::size_t best_item = 0;
      for (const auto& h : item.hashes) {
        for (const auto& k : kept_hashes) {
          int d = hamming(h, k.hash);
          if (d < best) {
            best = d;
            best_item = k.item;
          }
        }
      }
      if (best <= max_distance) {
        result.removals.push_back({item.id, items[best_item].id, best});
        continue;
      }
    } else {
      result.flagged.push_back(item.id);
    }
    result.kept.push_back(item.id);
    for (const auto& h : item.hashes) kept_hashes.push_back({h, idx});
  }
  return result;
}

}  // namespace geopulse::media
