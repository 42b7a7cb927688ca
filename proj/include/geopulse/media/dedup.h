#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geopulse/core/time.h"
#include "geopulse/media/dhash.h"

namespace geopulse::media {

inline constexpr int kDefaultMaxDistance = 10;

struct DedupItem {
  std::string id;
  Timestamp created_at{};
  std::vector<PerceptualHash> hashes;  // decodable images only
  bool undecodable = false;            // at least one image failed to decode
};

struct DedupRemoval {
  std::string removed_id;
  std::string matched_kept_id;
  int distance = 0;

  friend bool operator==(const DedupRemoval&, const DedupRemoval&) = default;
};

struct DedupResult {
  std::vector<std::string> kept;      // processing order
  std::vector<DedupRemoval> removals;
  std::vector<std::string> flagged;   // undecodable, passed through
};

// Items are processed in (created_at, id) order regardless of input order.
// An item is dropped iff one of its images is within max_distance of an image
// of an already-kept item; the closest such match is logged (ties resolved
// to the earliest kept image). Flagged items are never dropped.
DedupResult dedup(std::span<const DedupItem> items, int max_distance = kDefaultMaxDistance);

}  // namespace geopulse::media
