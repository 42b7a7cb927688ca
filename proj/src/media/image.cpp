#include "geopulse/media/image.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "geopulse/core/error.h"

namespace geopulse::media {

LuminanceImage::LuminanceImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

namespace {

// Reads one header integer, skipping whitespace and '#' comments.
long read_header_int(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    unsigned char c = static_cast<unsigned char>(bytes[pos]);
    if (std::isspace(c)) {
      ++pos;
    } else if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  std::size_t start = pos;
  long v = 0;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    v = v * 10 + (bytes[pos] - '0');
    if (v > 1'000'000) throw Error(ErrorCode::parse, "PGM header value too large");
    ++pos;
  }
  if (pos == start) throw Error(ErrorCode::parse, "PGM header truncated");
  return v;
}

}  // namespace

LuminanceImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::parse, "not a binary PGM (P5) image");
  }
  std::size_t pos = 2;
  long w = read_header_int(bytes, pos);
  long h = read_header_int(bytes, pos);
  long maxval = read_header_int(bytes, pos);
  if (w < 1 || h < 1) throw Error(ErrorCode::parse, "PGM dimensions must be positive");
  if (maxval < 1 || maxval > 255) throw Error(ErrorCode::parse, "PGM maxval must be in [1,255]");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error(ErrorCode::parse, "PGM header not terminated");
  }
  ++pos;
  std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < n) throw Error(ErrorCode::parse, "PGM pixel data truncated");
  LuminanceImage img(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < n; ++i) {
    auto v = static_cast<std::uint8_t>(bytes[pos + i]);
    if (v > maxval) throw Error(ErrorCode::parse, "PGM pixel exceeds maxval");
    img.pixels[i] = v;
  }
  return img;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LuminanceImage load_pgm(const std::filesystem::path& path) {
  return decode_pgm(read_file_bytes(path));
}

std::string encode_pgm(const LuminanceImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

void save_pgm(const std::filesystem::path& path, const LuminanceImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  auto bytes = encode_pgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace geopulse::media
