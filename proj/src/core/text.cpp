#include "geopulse/core/text.h"

#include <algorithm>
#include <memory>

#include <unicode/brkiter.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "geopulse/core/error.h"

namespace geopulse::text {
namespace {

const icu::Normalizer2& nfkc_casefold() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw Error(ErrorCode::engine, "ICU NFKC_Casefold normalizer unavailable");
  }
  return *n;
}

// BreakIterator instances are not thread-safe; one per thread.
icu::BreakIterator& word_breaker() {
  thread_local std::unique_ptr<icu::BreakIterator> it = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> b(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) {
      throw Error(ErrorCode::engine, "ICU word break iterator unavailable");
    }
    return b;
  }();
  return *it;
}

std::string fold_unicode(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfkc_casefold().normalize(s, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::engine, "NFKC casefold failed");
  }
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

bool is_url_or_handle(const icu::UnicodeString& chunk) {
  if (chunk.startsWith(u'@')) return true;
  icu::UnicodeString lower(chunk);
  lower.toLower(icu::Locale::getRoot());
  return lower.startsWith(icu::UnicodeString(u"http://")) ||
         lower.startsWith(icu::UnicodeString(u"https://")) ||
         lower.startsWith(icu::UnicodeString(u"www."));
}

}  // namespace

std::string fold(std::string_view utf8) {
  return fold_unicode(icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size()))));
}

std::vector<Token> tokenize(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::vector<Token> tokens;
  const int32_t n = s.length();

  auto& breaker = word_breaker();
  int32_t i = 0;
  while (i < n) {
    UChar32 c = s.char32At(i);
    if (u_isUWhiteSpace(c)) {
      i = s.moveIndex32(i, 1);
      continue;
    }
    int32_t chunk_end = i;
    while (chunk_end < n && !u_isUWhiteSpace(s.char32At(chunk_end))) {
      chunk_end = s.moveIndex32(chunk_end, 1);
    }
    icu::UnicodeString chunk(s, i, chunk_end - i);
    if (!is_url_or_handle(chunk)) {
      breaker.setText(chunk);
      int32_t start = breaker.first();
      for (int32_t end = breaker.next(); end != icu::BreakIterator::DONE;
           start = end, end = breaker.next()) {
        if (breaker.getRuleStatus() == UBRK_WORD_NONE) continue;
        icu::UnicodeString word(chunk, start, end - start);
        Token t;
        t.text = fold_unicode(word);
        t.begin = static_cast<std::size_t>(s.countChar32(0, i + start));
        t.end = t.begin + static_cast<std::size_t>(word.countChar32());
        tokens.push_back(std::move(t));
      }
    }
    i = chunk_end;
  }
  return tokens;
}

std::vector<std::string> token_set(std::string_view utf8) {
  std::vector<std::string> out;
  for (auto& t : tokenize(utf8)) out.push_back(std::move(t.text));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string name_key(std::string_view utf8) {
  std::string key;
  for (const auto& t : tokenize(utf8)) {
    if (!key.empty()) key.push_back(' ');
    key += t.text;
  }
  return key;
}

std::size_t code_point_count(std::string_view utf8) {
  return static_cast<std::size_t>(
      icu::UnicodeString::fromUTF8(
          icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())))
          .countChar32());
}

}  // namespace geopulse::text
