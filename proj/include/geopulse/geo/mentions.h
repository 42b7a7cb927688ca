#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "geopulse/core/gazetteer.h"

namespace geopulse::geo {

struct Mention {
  std::string surface;      // original text covered by the span
  std::size_t begin = 0;    // code point offsets into the post text
  std::size_t end = 0;
  std::vector<const GazetteerEntry*> candidates;
};

// Greedy leftmost-longest scan over folded tokens, n-grams of at most
// `max_tokens` tokens. Emitted spans never overlap.
std::vector<Mention> extract_mentions(std::string_view text, const Gazetteer& gazetteer,
                                      std::size_t max_tokens = 3);

}  // namespace geopulse::geo
