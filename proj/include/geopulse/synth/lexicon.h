#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geopulse::synth {

// Bundled word lists. Background words fill every post; event words appear
// at the base term rate and get boosted inside event windows.
struct Lexicon {
  std::string language;
  std::vector<std::string_view> background;
  std::vector<std::string_view> event_terms;
};

std::span<const Lexicon> bundled_lexicons();
const Lexicon* find_lexicon(std::string_view language);

// Syllables used to coin synthetic place names.
std::span<const std::string_view> place_syllables();

}  // namespace geopulse::synth
