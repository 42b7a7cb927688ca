#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geopulse/core/events.h"
#include "geopulse/core/post.h"
#include "geopulse/core/time.h"

namespace geopulse::trigger {

struct TermSeries {
  std::string term;
  Seconds bucket_width{3600};
  Timestamp origin{};
  std::vector<std::int64_t> counts;

  Timestamp bucket_start(std::size_t i) const {
    return origin + bucket_width * static_cast<std::int64_t>(i);
  }
  Timestamp end() const { return bucket_start(counts.size()); }
};

// Post reduced to what the trigger needs: time, language and its folded
// token set (sorted, unique).
struct TokenizedPost {
  Timestamp created_at{};
  std::string lang;
  std::vector<std::string> tokens;

  bool contains(const std::string& folded_term) const;
};

std::vector<TokenizedPost> tokenize_posts(std::span<const Post> posts);

// Counts, per bucket of [from, to), the posts whose token set contains each
// term. from and to must be aligned to bucket_width. Terms are folded first.
std::vector<TermSeries> bucket_term_counts(std::span<const TokenizedPost> posts,
                                           std::span<const std::string> terms,
                                           Seconds bucket_width, Timestamp from, Timestamp to);
std::vector<TermSeries> bucket_term_counts(std::span<const Post> posts,
                                           std::span<const std::string> terms,
                                           Seconds bucket_width, Timestamp from, Timestamp to);

// Smallest aligned span covering every post, or an empty span at the epoch.
std::pair<Timestamp, Timestamp> covering_span(std::span<const TokenizedPost> posts,
                                              Seconds bucket_width);

// 1 for buckets during which any event is active, else 0.
std::vector<double> event_activity(std::span<const EventRecord> events,
                                   Timestamp origin, Seconds bucket_width, std::size_t n);

}  // namespace geopulse::trigger
