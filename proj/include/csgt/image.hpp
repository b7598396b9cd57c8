#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "csgt/error.hpp"

namespace csgt {

/// Grayscale image, row-major, pixels held as doubles.
///
/// Ingested 8-bit images have every pixel in [0, 255]; intermediate images
/// (e.g. after the gray transformation) may hold any real value, so the range
/// is checked by `validate_pixel_range()` rather than enforced on every write.
class Image {
 public:
  Image() = default;

  Image(std::size_t width, std::size_t height, double fill = 0.0)
      : width_(width), height_(height), pixels_(width * height, fill) {
    if (width == 0 || height == 0) throw UsageError("image dimensions must be positive");
  }

  Image(std::size_t width, std::size_t height, std::vector<double> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width == 0 || height == 0) throw UsageError("image dimensions must be positive");
    if (pixels_.size() != width * height)
      throw UsageError("pixel count does not match width*height");
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  // Throws unless every pixel lies in [0, 255].
  void validate_pixel_range() const {
    for (double p : pixels_) {
      if (!(p >= 0.0 && p <= 255.0)) throw DataError("pixel value outside [0, 255]");
    }
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

// Crops the top-left `width` x `height` window.
inline Image crop(const Image& img, std::size_t width, std::size_t height) {
  if (width > img.width() || height > img.height()) throw UsageError("crop window exceeds image");
  Image out(width, height);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) out.at(r, c) = img.at(r, c);
  return out;
}

// Rounds and clamps to 8-bit.
inline std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

namespace pgm {

namespace detail {

inline void skip_ws_and_comments(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in.get();
    } else {
      return;
    }
  }
}

inline std::size_t read_header_int(std::istream& in) {
  skip_ws_and_comments(in);
  long long v = -1;
  if (!(in >> v) || v <= 0) throw DataError("malformed PGM header");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

// Reads an 8-bit binary PGM (P5, maxval 255).
inline Image read(std::istream& in) {
  char magic[2] = {0, 0};
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5')
    throw DataError("not a binary PGM (P5) file");
  const std::size_t width = detail::read_header_int(in);
  const std::size_t height = detail::read_header_int(in);
  const std::size_t maxval = detail::read_header_int(in);
  if (maxval != 255) throw DataError("only 8-bit PGM (maxval 255) is supported");
  if (width > 65535 || height > 65535) throw DataError("PGM dimensions exceed 65535");
  // Exactly one whitespace byte separates the header from the raster.
  in.get();
  std::vector<unsigned char> raw(width * height);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw DataError("truncated PGM raster");
  std::vector<double> pixels(raw.begin(), raw.end());
  return Image(width, height, std::move(pixels));
}

inline Image read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read(in);
}

inline void write(std::ostream& out, const Image& img) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<char> raw(img.size());
  std::ranges::transform(img.pixels(), raw.begin(),
                         [](double p) { return static_cast<char>(to_u8(p)); });
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

inline void write_file(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write(out, img);
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace pgm
}  // namespace csgt
