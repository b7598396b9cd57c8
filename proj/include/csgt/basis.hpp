#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "csgt/error.hpp"
#include "csgt/image.hpp"

namespace csgt {

enum class BasisKind { kWavelet, kDct };

/// Orthonormal 2D transform used as the sparsifying domain.
///
/// Coefficients are laid out in an image of the same size. Coefficients
/// flagged by `is_approximation` carry the coarse image content and are never
/// thresholded; `is_finest_detail` marks the band used for noise estimation.
class SparsityBasis {
 public:
  virtual ~SparsityBasis() = default;

  virtual BasisKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual Image forward(const Image& img) const = 0;
  virtual Image inverse(const Image& coeffs) const = 0;
  virtual bool is_approximation(std::size_t row, std::size_t col) const = 0;
  virtual bool is_finest_detail(std::size_t row, std::size_t col) const = 0;
};

// ---------------------------------------------------------------------------

/// Orthogonal wavelet filter bank, defined by its lowpass taps.
struct WaveletFilter {
  std::string name;
  std::vector<double> lowpass;

  // Quadrature mirror: g[k] = (-1)^k h[L-1-k].
  std::vector<double> highpass() const {
    std::vector<double> g(lowpass.size());
    for (std::size_t k = 0; k < g.size(); ++k)
      g[k] = (k % 2 ? -1.0 : 1.0) * lowpass[lowpass.size() - 1 - k];
    return g;
  }

  static WaveletFilter haar() { return {"haar", {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}}; }

  // Daubechies, 2 vanishing moments (4 taps).
  static WaveletFilter db2() {
    const double s3 = std::sqrt(3.0), d = 4.0 * std::numbers::sqrt2;
    return {"db2", {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d}};
  }

  // Daubechies, 4 vanishing moments (8 taps).
  static WaveletFilter db4() {
    return {"db4",
            {0.23037781330885523, 0.7148465705525415, 0.6308807679295904, -0.02798376941698385,
             -0.18703481171888114, 0.030841381835986965, 0.032883011666982945,
             -0.010597401784997278}};
  }

  static WaveletFilter by_name(const std::string& n) {
    if (n == "haar") return haar();
    if (n == "db2") return db2();
    if (n == "db4") return db4();
    throw UsageError("unknown wavelet filter: " + n);
  }
};

/// Separable periodic DWT over the whole image.
///
/// Each level splits the current low band into [approx | detail] halves along
/// rows, then columns, with circular extension, which keeps the transform
/// exactly orthonormal. Levels are capped so every band has even length.
class WaveletBasis final : public SparsityBasis {
 public:
  WaveletBasis(std::size_t width, std::size_t height, std::size_t levels = 4,
               WaveletFilter filter = WaveletFilter::db2())
      : width_(width), height_(height), filter_(std::move(filter)) {
    highpass_ = filter_.highpass();
    levels_ = 0;
    while (levels_ < levels && (width >> levels_) % 2 == 0 && (height >> levels_) % 2 == 0)
      ++levels_;
  }

  BasisKind kind() const override { return BasisKind::kWavelet; }
  std::string name() const override { return "wavelet-" + filter_.name; }
  std::size_t levels() const { return levels_; }

  Image forward(const Image& img) const override {
    check(img);
    Image c = img;
    std::vector<double> line, tmp;
    for (std::size_t lev = 0; lev < levels_; ++lev) {
      const std::size_t w = width_ >> lev, h = height_ >> lev;
      for (std::size_t r = 0; r < h; ++r) {
        line.assign(&c.at(r, 0), &c.at(r, 0) + w);
        analyze(line, tmp);
        std::copy(tmp.begin(), tmp.end(), &c.at(r, 0));
      }
      line.resize(h);
      for (std::size_t col = 0; col < w; ++col) {
        for (std::size_t r = 0; r < h; ++r) line[r] = c.at(r, col);
        analyze(line, tmp);
        for (std::size_t r = 0; r < h; ++r) c.at(r, col) = tmp[r];
      }
    }
    return c;
  }

  Image inverse(const Image& coeffs) const override {
    check(coeffs);
    Image x = coeffs;
    std::vector<double> line, tmp;
    for (std::size_t lev = levels_; lev-- > 0;) {
      const std::size_t w = width_ >> lev, h = height_ >> lev;
      line.resize(h);
      for (std::size_t col = 0; col < w; ++col) {
        for (std::size_t r = 0; r < h; ++r) line[r] = x.at(r, col);
        synthesize(line, tmp);
        for (std::size_t r = 0; r < h; ++r) x.at(r, col) = tmp[r];
      }
      for (std::size_t r = 0; r < h; ++r) {
        line.assign(&x.at(r, 0), &x.at(r, 0) + w);
        synthesize(line, tmp);
        std::copy(tmp.begin(), tmp.end(), &x.at(r, 0));
      }
    }
    return x;
  }

  bool is_approximation(std::size_t row, std::size_t col) const override {
    return row < (height_ >> levels_) && col < (width_ >> levels_);
  }

  // HH band of the first level.
  bool is_finest_detail(std::size_t row, std::size_t col) const override {
    return levels_ > 0 && row >= height_ / 2 && col >= width_ / 2;
  }

 private:
  void check(const Image& img) const {
    if (img.width() != width_ || img.height() != height_)
      throw UsageError("image size does not match the wavelet basis");
  }

  // x (length n, even) -> [approx(n/2) | detail(n/2)]
  void analyze(const std::vector<double>& x, std::vector<double>& out) const {
    const std::size_t n = x.size(), half = n / 2, taps = filter_.lowpass.size();
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
      double a = 0.0, d = 0.0;
      for (std::size_t k = 0; k < taps; ++k) {
        const double v = x[(2 * i + k) % n];
        a += filter_.lowpass[k] * v;
        d += highpass_[k] * v;
      }
      out[i] = a;
      out[half + i] = d;
    }
  }

  void synthesize(const std::vector<double>& c, std::vector<double>& out) const {
    const std::size_t n = c.size(), half = n / 2, taps = filter_.lowpass.size();
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
      const double a = c[i], d = c[half + i];
      for (std::size_t k = 0; k < taps; ++k)
        out[(2 * i + k) % n] += filter_.lowpass[k] * a + highpass_[k] * d;
    }
  }

  std::size_t width_, height_, levels_;
  WaveletFilter filter_;
  std::vector<double> highpass_;
};

// ---------------------------------------------------------------------------

/// Orthonormal DCT-II applied independently to each block_size x block_size tile.
class DctBasis final : public SparsityBasis {
 public:
  DctBasis(std::size_t width, std::size_t height, std::size_t block_size)
      : width_(width), height_(height), b_(block_size), c_(block_size * block_size) {
    if (block_size == 0 || width % block_size || height % block_size)
      throw UsageError("DCT block size must divide the image dimensions");
    for (std::size_t k = 0; k < b_; ++k) {
      const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(b_));
      for (std::size_t n = 0; n < b_; ++n)
        c_[k * b_ + n] = scale * std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / (2.0 * b_));
    }
  }

  BasisKind kind() const override { return BasisKind::kDct; }
  std::string name() const override { return "dct"; }

  Image forward(const Image& img) const override { return apply(img, false); }
  Image inverse(const Image& coeffs) const override { return apply(coeffs, true); }

  // DC term of each tile.
  bool is_approximation(std::size_t row, std::size_t col) const override {
    return row % b_ == 0 && col % b_ == 0;
  }

  // Upper half of both in-tile frequencies.
  bool is_finest_detail(std::size_t row, std::size_t col) const override {
    return b_ > 1 && row % b_ >= b_ / 2 && col % b_ >= b_ / 2;
  }

 private:
  // Tile-wise C X C^T (forward) or C^T X C (inverse).
  Image apply(const Image& in, bool transpose) const {
    if (in.width() != width_ || in.height() != height_)
      throw UsageError("image size does not match the DCT basis");
    Image out(width_, height_);
    std::vector<double> tile(b_ * b_), mid(b_ * b_);
    auto m = [&](std::size_t i, std::size_t j) { return transpose ? c_[j * b_ + i] : c_[i * b_ + j]; };
    for (std::size_t by = 0; by < height_; by += b_) {
      for (std::size_t bx = 0; bx < width_; bx += b_) {
        for (std::size_t r = 0; r < b_; ++r)
          for (std::size_t c = 0; c < b_; ++c) tile[r * b_ + c] = in.at(by + r, bx + c);
        for (std::size_t r = 0; r < b_; ++r)
          for (std::size_t c = 0; c < b_; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < b_; ++k) s += m(r, k) * tile[k * b_ + c];
            mid[r * b_ + c] = s;
          }
        for (std::size_t r = 0; r < b_; ++r)
          for (std::size_t c = 0; c < b_; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < b_; ++k) s += mid[r * b_ + k] * m(c, k);
            out.at(by + r, bx + c) = s;
          }
      }
    }
    return out;
  }

  std::size_t width_, height_, b_;
  std::vector<double> c_;  // row k = k-th cosine basis vector
};

inline std::unique_ptr<SparsityBasis> make_basis(BasisKind kind, std::size_t width, std::size_t height,
                                                 std::size_t block_size,
                                                 const std::string& filter = "db2",
                                                 std::size_t levels = 4) {
  if (kind == BasisKind::kDct) return std::make_unique<DctBasis>(width, height, block_size);
  return std::make_unique<WaveletBasis>(width, height, levels, WaveletFilter::by_name(filter));
}

}  // namespace csgt
