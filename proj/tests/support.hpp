#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "csgt/image.hpp"

namespace csgt::testing {

// Smooth gradient plus a bright disc and a few ramps; piecewise-smooth like a photo.
inline Image synthetic_image(std::size_t w, std::size_t h, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-2.0, 2.0);
  Image img(w, h);
  const double cx = 0.6 * static_cast<double>(w), cy = 0.4 * static_cast<double>(h);
  const double rad = 0.25 * static_cast<double>(std::min(w, h));
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      const double x = static_cast<double>(c), y = static_cast<double>(r);
      double v = 60.0 + 80.0 * x / static_cast<double>(w) + 30.0 * std::sin(y / 9.0);
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < rad * rad) v += 70.0;
      if (c < w / 5) v -= 40.0;
      img.at(r, c) = std::clamp(std::round(v + jitter(rng)), 0.0, 255.0);
    }
  return img;
}

inline Image random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  Image img(w, h);
  for (double& p : img.pixels()) p = px(rng);
  return img;
}

#ifdef CSGT_CORPUS_DIR
inline std::string corpus_path(const std::string& stem) {
  return std::string(CSGT_CORPUS_DIR) + "/" + stem + ".pgm";
}
#endif

}  // namespace csgt::testing
