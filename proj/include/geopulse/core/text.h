#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace geopulse::text {

// A word from post text. `text` is NFKC-casefolded; begin/end are code point
// offsets into the original (unnormalized) string.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// NFKC_Casefold of a UTF-8 string. Invalid UTF-8 sequences become U+FFFD.
std::string fold(std::string_view utf8);

// Unicode word segmentation after dropping URLs and @-handles. Hashtags
// contribute their tag text; punctuation and whitespace never form tokens.
std::vector<Token> tokenize(std::string_view utf8);

// Sorted, de-duplicated folded token set.
std::vector<std::string> token_set(std::string_view utf8);

// Canonical lookup key for a place name: folded tokens joined by one space.
// "Paris, TX" and "PARIS tx" both map to "paris tx".
std::string name_key(std::string_view utf8);

std::size_t code_point_count(std::string_view utf8);

}  // namespace geopulse::text
