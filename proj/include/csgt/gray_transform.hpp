#pragma once

#include <cstddef>
#include <numeric>

#include "csgt/error.hpp"
#include "csgt/image.hpp"
#include "csgt/sensing.hpp"

namespace csgt {

/// Constant subtracted from every pixel before sampling.
///
/// The value crosses the channel as an IEEE single, so encoder and decoder
/// both work with the float-rounded value; `optimal_constant` already rounds.
struct GrayConstant {
  double value = 0.0;

  static GrayConstant from_float(float v) { return {static_cast<double>(v)}; }
  float as_float() const { return static_cast<float>(value); }
};

// Pixel mean: the minimizer of sum_j (x_j - a)^2, hence of the measurement variance.
inline GrayConstant optimal_constant(const Image& img) {
  const auto px = img.pixels();
  const double sum = std::accumulate(px.begin(), px.end(), 0.0);
  return GrayConstant::from_float(static_cast<float>(sum / static_cast<double>(px.size())));
}

inline Image forward_transform(const Image& img, GrayConstant a) {
  Image out = img;
  for (double& p : out.pixels()) p -= a.value;
  return out;
}

// y_a = Phi * (a * 1): the constant times the row sums of Phi.
inline MeasurementVector measurement_offset(const MeasurementMatrix& phi, GrayConstant a) {
  return {phi.entries.rowwise().sum() * a.value, MeasurementRole::kOffset};
}

// y-hat = y-hat' + y_a.
inline MeasurementVector inverse_transform(const MeasurementVector& y_hat_prime,
                                           const MeasurementVector& y_a) {
  if (y_hat_prime.size() != y_a.size()) throw UsageError("measurement length mismatch");
  return {y_hat_prime.values + y_a.values, MeasurementRole::kDequantized};
}

// Var(y'_i) = (1/m) * sum_j (x_j - a)^2 for Phi entries ~ N(0, 1/m).
inline double predicted_variance(std::span<const double> pixels, GrayConstant a, std::size_t m) {
  if (m == 0) throw UsageError("m must be at least 1");
  double acc = 0.0;
  for (double x : pixels) acc += (x - a.value) * (x - a.value);
  return acc / static_cast<double>(m);
}

inline double predicted_variance(const Image& img, GrayConstant a, std::size_t m) {
  return predicted_variance(img.pixels(), a, m);
}

}  // namespace csgt
