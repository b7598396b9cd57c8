#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "csgt/error.hpp"
#include "csgt/sensing.hpp"

namespace csgt {

inline constexpr int kMinBitDepth = 1;
inline constexpr int kMaxBitDepth = 16;

/// Uniform midrise quantizer over [lower, upper) with 2^bit_depth cells.
struct QuantizerConfig {
  int bit_depth = 8;
  double lower = 0.0;
  double upper = 1.0;

  std::uint32_t levels() const { return 1u << bit_depth; }
  double step() const { return (upper - lower) / static_cast<double>(levels()); }

  void validate() const {
    if (bit_depth < kMinBitDepth || bit_depth > kMaxBitDepth)
      throw UsageError("bit depth must be in [1, 16]");
    if (!(lower < upper)) throw UsageError("quantizer range must satisfy lower < upper");
  }
};

struct QuantizedBlock {
  std::vector<std::uint32_t> indices;
  QuantizerConfig config;
};

// Range = [min, max] of the samples; a degenerate range is widened by +-0.5.
// Bounds are rounded outward to float so the header stores them exactly.
inline QuantizerConfig fit_range(std::span<const double> samples, int bit_depth) {
  if (samples.empty()) throw UsageError("cannot fit a quantizer range to no samples");
  const auto [lo_it, hi_it] = std::ranges::minmax_element(samples);
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  auto lo_f = static_cast<float>(lo);
  auto hi_f = static_cast<float>(hi);
  if (static_cast<double>(lo_f) > lo) lo_f = std::nextafter(lo_f, -INFINITY);
  if (static_cast<double>(hi_f) < hi) hi_f = std::nextafter(hi_f, INFINITY);
  QuantizerConfig cfg{bit_depth, lo_f, hi_f};
  cfg.validate();
  return cfg;
}

inline std::uint32_t quantize_value(double v, const QuantizerConfig& cfg) {
  if (std::isnan(v)) throw UsageError("cannot quantize NaN");
  const double cell = std::floor((v - cfg.lower) / cfg.step());
  const double top = static_cast<double>(cfg.levels() - 1);
  return static_cast<std::uint32_t>(std::clamp(cell, 0.0, top));
}

inline double dequantize_value(std::uint32_t index, const QuantizerConfig& cfg) {
  if (index >= cfg.levels()) throw UsageError("quantization index out of range");
  return cfg.lower + (static_cast<double>(index) + 0.5) * cfg.step();
}

inline QuantizedBlock quantize(std::span<const double> values, const QuantizerConfig& cfg) {
  cfg.validate();
  QuantizedBlock q{std::vector<std::uint32_t>(values.size()), cfg};
  for (std::size_t i = 0; i < values.size(); ++i) q.indices[i] = quantize_value(values[i], cfg);
  return q;
}

inline QuantizedBlock quantize(const MeasurementVector& v, const QuantizerConfig& cfg) {
  return quantize(std::span<const double>(v.values.data(), v.size()), cfg);
}

inline MeasurementVector dequantize(const QuantizedBlock& q) {
  q.config.validate();
  MeasurementVector out{Eigen::VectorXd(static_cast<Eigen::Index>(q.indices.size())),
                        MeasurementRole::kDequantizedShift};
  for (std::size_t i = 0; i < q.indices.size(); ++i)
    out.values(static_cast<Eigen::Index>(i)) = dequantize_value(q.indices[i], q.config);
  return out;
}

// High-rate distortion model for Gaussian samples: (pi/6) * variance * 2^(-2R).
inline double predicted_distortion(double variance, double rate_bits) {
  if (variance < 0.0 || rate_bits < 0.0) throw UsageError("variance and rate must be non-negative");
  return std::numbers::pi / 6.0 * variance * std::exp2(-2.0 * rate_bits);
}

}  // namespace csgt
