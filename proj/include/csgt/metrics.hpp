#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "csgt/error.hpp"
#include "csgt/image.hpp"

namespace csgt {

inline constexpr double kPeakValue = 255.0;
inline constexpr std::size_t kDefaultHistogramBins = 64;

inline double mean_squared_error(const Image& reference, const Image& test) {
  if (reference.width() != test.width() || reference.height() != test.height())
    throw UsageError("PSNR needs images of equal dimensions");
  const auto a = reference.pixels();
  const auto b = test.pixels();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

// 10 log10(255^2 / MSE); +inf for identical images.
inline double psnr(const Image& reference, const Image& test) {
  const double mse = mean_squared_error(reference, test);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPeakValue * kPeakValue / mse);
}

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // population variance
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

inline SampleMoments moments(std::span<const double> v) {
  if (v.empty()) throw UsageError("moments of an empty sample");
  const auto n = static_cast<double>(v.size());
  SampleMoments m;
  for (double x : v) m.mean += x;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

inline double sample_variance(std::span<const double> v) { return moments(v).variance; }

/// Equal-width histogram spanning [min, max] of the data.
struct Histogram {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::uint64_t> counts;

  double bin_width() const { return (upper - lower) / static_cast<double>(counts.size()); }
  double bin_lower(std::size_t i) const { return lower + bin_width() * static_cast<double>(i); }
};

// A single distinct value collapses to one bin.
inline Histogram measurement_histogram(std::span<const double> values,
                                       std::size_t bin_count = kDefaultHistogramBins) {
  if (values.empty()) throw UsageError("histogram of an empty sample");
  if (bin_count == 0) throw UsageError("histogram needs at least one bin");
  const auto [lo, hi] = std::ranges::minmax_element(values);
  Histogram h{*lo, *hi, {}};
  if (h.upper == h.lower) {
    h.counts.assign(1, values.size());
    return h;
  }
  h.counts.assign(bin_count, 0);
  const double w = h.bin_width();
  for (double v : values) {
    auto bin = static_cast<std::size_t>((v - h.lower) / w);
    ++h.counts[std::min(bin, bin_count - 1)];
  }
  return h;
}

// Shannon entropy in bits/symbol of the empirical symbol distribution.
inline double empirical_entropy(std::span<const std::uint32_t> symbols) {
  if (symbols.empty()) throw UsageError("entropy of an empty sequence");
  std::map<std::uint32_t, std::uint64_t> counts;
  for (auto s : symbols) ++counts[s];
  const auto n = static_cast<double>(symbols.size());
  double h = 0.0;
  for (const auto& [sym, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h > 0.0 ? h : 0.0;
}

}  // namespace csgt
