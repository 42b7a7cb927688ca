#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace geopulse::media {

struct LuminanceImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height

  LuminanceImage() = default;
  LuminanceImage(int w, int h, std::uint8_t fill = 0);

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const LuminanceImage&, const LuminanceImage&) = default;
};

// Binary PGM (P5) with maxval <= 255. Throws Error(parse) on anything else.
LuminanceImage decode_pgm(std::string_view bytes);
LuminanceImage load_pgm(const std::filesystem::path& path);
std::string encode_pgm(const LuminanceImage& img);
void save_pgm(const std::filesystem::path& path, const LuminanceImage& img);

std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace geopulse::media
