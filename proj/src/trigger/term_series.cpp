#include "geopulse/trigger/term_series.h"

#include <algorithm>

#include "geopulse/core/error.h"
#include "geopulse/core/events.h"
#include "geopulse/core/parallel.h"
#include "geopulse/core/text.h"

namespace geopulse::trigger {

bool TokenizedPost::contains(const std::string& folded_term) const {
  return std::binary_search(tokens.begin(), tokens.end(), folded_term);
}

std::vector<TokenizedPost> tokenize_posts(std::span<const Post> posts) {
  std::vector<TokenizedPost> out(posts.size());
  parallel_for(posts.size(), [&](std::size_t i) {
    out[i].created_at = posts[i].created_at;
    out[i].lang = posts[i].lang;
    out[i].tokens = text::token_set(posts[i].text);
  });
  return out;
}

namespace {

void check_aligned(Timestamp t, Seconds width, const char* what) {
  if (floor_to(t, width) != t) {
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + " " + format_timestamp(t) + " is not aligned to the bucket width");
  }
}

}  // namespace

std::vector<TermSeries> bucket_term_counts(std::span<const TokenizedPost> posts,
                                           std::span<const std::string> terms,
                                           Seconds bucket_width, Timestamp from, Timestamp to) {
  if (terms.empty()) throw Error(ErrorCode::invalid_argument, "dictionary is empty: nothing to count");
  if (bucket_width.count() <= 0) throw Error(ErrorCode::invalid_argument, "bucket width must be positive");
  check_aligned(from, bucket_width, "span start");
  check_aligned(to, bucket_width, "span end");
  if (to < from) throw Error(ErrorCode::invalid_argument, "span end precedes span start");

  auto n = static_cast<std::size_t>((to - from) / bucket_width);
  std::vector<TermSeries> out(terms.size());
  std::vector<std::string> folded(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    folded[k] = text::fold(terms[k]);
    out[k].term = terms[k];
    out[k].bucket_width = bucket_width;
    out[k].origin = from;
    out[k].counts.assign(n, 0);
  }
  for (const auto& p : posts) {
    if (p.created_at < from || p.created_at >= to) continue;
    auto b = static_cast<std::size_t>((p.created_at - from) / bucket_width);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (p.contains(folded[k])) ++out[k].counts[b];
    }
  }
  return out;
}

std::vector<TermSeries> bucket_term_counts(std::span<const Post> posts,
                                           std::span<const std::string> terms,
                                           Seconds bucket_width, Timestamp from, Timestamp to) {
  auto tokenized = tokenize_posts(posts);
  return bucket_term_counts(tokenized, terms, bucket_width, from, to);
}

std::pair<Timestamp, Timestamp> covering_span(std::span<const TokenizedPost> posts,
                                              Seconds bucket_width) {
  if (posts.empty()) return {Timestamp{}, Timestamp{}};
  auto [lo, hi] = std::minmax_element(posts.begin(), posts.end(), [](const auto& a, const auto& b) {
    return a.created_at < b.created_at;
  });
  return {floor_to(lo->created_at, bucket_width),
          floor_to(hi->created_at, bucket_width) + bucket_width};
}

std::vector<double> event_activity(std::span<const EventRecord> events, Timestamp origin,
                                   Seconds bucket_width, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Timestamp b0 = origin + bucket_width * static_cast<std::int64_t>(i);
    for (const auto& e : events) {
      if (e.active_during(b0, b0 + bucket_width)) {
        out[i] = 1.0;
        break;
      }
    }
  }
  return out;
}

}  // namespace geopulse::trigger
