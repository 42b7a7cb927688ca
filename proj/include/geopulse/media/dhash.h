#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "geopulse/media/image.h"

namespace geopulse::media {

// 64-bit difference hash. Bit for cell (r, c) of the 9x8 downsample lives at
// position 63 - (8r + c), so the hex form reads row-major left to right.
struct PerceptualHash {
  std::uint64_t bits = 0;

  bool bit(int row, int col) const { return (bits >> (63 - (8 * row + col))) & 1u; }
  std::string hex() const;

  friend bool operator==(const PerceptualHash&, const PerceptualHash&) = default;
};

// Area-weighted mean downsample to 9 columns x 8 rows; bit(r,c) is set iff
// cell(r,c) > cell(r,c+1). The comparison runs on exact integer area sums.
PerceptualHash dhash(const LuminanceImage& img);

inline int hamming(PerceptualHash a, PerceptualHash b) {
  return std::popcount(a.bits ^ b.bits);
}

}  // namespace geopulse::media
