#include "geopulse/geo/mentions.h"

#include <algorithm>

#include <unicode/unistr.h>

#include "geopulse/core/text.h"

namespace geopulse::geo {
namespace {

std::string substring_code_points(const icu::UnicodeString& s, std::size_t begin,
                                  std::size_t end) {
  int32_t b = s.moveIndex32(0, static_cast<int32_t>(begin));
  int32_t e = s.moveIndex32(0, static_cast<int32_t>(end));
  std::string out;
  icu::UnicodeString(s, b, e - b).toUTF8String(out);
  return out;
}

}  // namespace

std::vector<Mention> extract_mentions(std::string_view text, const Gazetteer& gazetteer,
                                      std::size_t max_tokens) {
  std::vector<Mention> mentions;
  if (gazetteer.empty()) return mentions;
  auto tokens = text::tokenize(text);
  std::size_t longest = std::min(max_tokens, gazetteer.max_name_tokens());
  icu::UnicodeString original;

  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    std::size_t max_n = std::min(longest, tokens.size() - i);
    for (std::size_t n = max_n; n >= 1; --n) {
      std::string key = tokens[i].text;
      for (std::size_t k = 1; k < n; ++k) key += " " + tokens[i + k].text;
      auto candidates = gazetteer.lookup_key(key);
      if (candidates.empty()) continue;
      if (original.isEmpty()) {
        original = icu::UnicodeString::fromUTF8(
            icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
      }
      Mention m;
      m.begin = tokens[i].begin;
      m.end = tokens[i + n - 1].end;
      m.surface = substring_code_points(original, m.begin, m.end);
      m.candidates = std::move(candidates);
      mentions.push_back(std::move(m));
      i += n;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return mentions;
}

}  // namespace geopulse::geo
