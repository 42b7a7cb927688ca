#include "geopulse/media/dhash.h"

#include <algorithm>
#include <array>
#include <cstdio>

#include "geopulse/core/error.h"

namespace geopulse::media {
namespace {

constexpr int kCols = 9;
constexpr int kRows = 8;

// Overlap of pixel `p` (covering [cells*p, cells*p + cells) in scaled units)
// with cell `c` (covering [extent*c, extent*(c+1))).
std::int64_t overlap(int p, int c, int cells, int extent) {
  std::int64_t lo = std::max<std::int64_t>(std::int64_t{cells} * p, std::int64_t{extent} * c);
  std::int64_t hi = std::min<std::int64_t>(std::int64_t{cells} * (p + 1),
                                           std::int64_t{extent} * (c + 1));
  return std::max<std::int64_t>(0, hi - lo);
}

}  // namespace

std::string PerceptualHash::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
  return buf;
}

PerceptualHash dhash(const LuminanceImage& img) {
  if (img.width < 1 || img.height < 1) {
    throw Error(ErrorCode::invalid_argument, "dhash needs a non-empty image");
  }
  const int w = img.width;
  const int h = img.height;

  // Every cell has the same total weight (w * h in scaled units), so
  // comparing weighted sums is the same as comparing area means.
  std::array<std::array<std::int64_t, kCols>, kRows> cell{};
  std::vector<std::int64_t> row_sums(kCols);
  for (int y = 0; y < h; ++y) {
    std::fill(row_sums.begin(), row_sums.end(), 0);
    for (int x = 0; x < w; ++x) {
      int c_first = static_cast<int>((std::int64_t{kCols} * x) / w);
      int c_last = std::min(kCols - 1, static_cast<int>((std::int64_t{kCols} * x + kCols - 1) / w));
      for (int c = c_first; c <= c_last; ++c) {
        row_sums[c] += overlap(x, c, kCols, w) * img.at(x, y);
      }
    }
    int r_first = static_cast<int>((std::int64_t{kRows} * y) / h);
    int r_last = std::min(kRows - 1, static_cast<int>((std::int64_t{kRows} * y + kRows - 1) / h));
    for (int r = r_first; r <= r_last; ++r) {
      std::int64_t wy = overlap(y, r, kRows, h);
      for (int c = 0; c < kCols; ++c) cell[r][c] += wy * row_sums[c];
    }
  }

  PerceptualHash hash;
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols - 1; ++c) {
      if (cell[r][c] > cell[r][c + 1]) hash.bits |= std::uint64_t{1} << (63 - (8 * r + c));
    }
  }
  return hash;
}

}  // namespace geopulse::media
