#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace csgt {

// Identifies the generator recorded in bitstream headers. Bump when any
// derived sequence changes, so old streams are rejected rather than misdecoded.
enum class PrngId : std::uint8_t {
  kMt64BoxMullerV1 = 1,
};

/// Versioned, reproducible random source.
///
/// std::mt19937_64 output is fixed by the standard; the uniform, normal and
/// bounded-integer conversions below are written out by hand because the
/// std:: distributions are implementation-defined.
class Prng {
 public:
  static constexpr PrngId kId = PrngId::kMt64BoxMullerV1;

  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace csgt
