#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "csgt/metrics.hpp"
#include "csgt/prng.hpp"
#include "support.hpp"

using namespace csgt;

TEST_CASE("PSNR basics") {
  const Image a = testing::random_image(16, 16, 1);
  CHECK(psnr(a, a) == std::numeric_limits<double>::infinity());
  CHECK(psnr(Image(4, 4, 0.0), Image(4, 4, 255.0)) == Catch::Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(psnr(Image(4, 4), Image(4, 5)), UsageError);
  const Image b = testing::random_image(16, 16, 2);
  CHECK(psnr(a, b) == psnr(b, a));
}

TEST_CASE("PSNR under uniform noise matches the closed form") {
  const Image ref(256, 256, 128.0);
  Image noisy = ref;
  Prng rng(5);
  const double half_width = 6.0;
  for (double& p : noisy.pixels()) p += half_width * (2.0 * rng.uniform() - 1.0);
  const double expected = 10.0 * std::log10(255.0 * 255.0 / (half_width * half_width / 3.0));
  CHECK(std::abs(psnr(ref, noisy) - expected) < 0.1);
}

TEST_CASE("moments of known samples") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto m = moments(v);
  CHECK(m.mean == 2.5);
  CHECK(m.variance == 1.25);
  CHECK(m.skewness == Catch::Approx(0.0).margin(1e-12));
  CHECK(m.excess_kurtosis == Catch::Approx(1.64 - 3.0));
  CHECK(moments(std::vector<double>{3, 3, 3}).variance == 0.0);
  CHECK_THROWS_AS(moments(std::vector<double>{}), UsageError);
}

TEST_CASE("histogram of one value is a single bin") {
  const auto h = measurement_histogram(std::vector<double>{4.2});
  REQUIRE(h.counts.size() == 1);
  CHECK(h.counts[0] == 1);
  CHECK_THROWS_AS(measurement_histogram(std::vector<double>{}), UsageError);
  CHECK_THROWS_AS(measurement_histogram(std::vector<double>{1, 2}, 0), UsageError);
}

TEST_CASE("histogram of uniform data is flat") {
  Prng rng(3);
  std::vector<double> v(100000);
  for (double& x : v) x = -5.0 + 10.0 * rng.uniform();
  const auto h = measurement_histogram(v, 20);
  REQUIRE(h.counts.size() == 20);
  std::uint64_t total = 0, lo = UINT64_MAX, hi = 0;
  for (auto c : h.counts) {
    total += c;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(total == v.size());
  CHECK(static_cast<double>(hi) / static_cast<double>(lo) < 1.5);
  CHECK(h.bin_lower(0) == h.lower);
  CHECK(h.bin_lower(20) == Catch::Approx(h.upper));
}

TEST_CASE("empirical entropy") {
  CHECK(empirical_entropy(std::vector<std::uint32_t>(50, 7)) == 0.0);
  CHECK(empirical_entropy(std::vector<std::uint32_t>{0, 1, 0, 1}) == Catch::Approx(1.0));
  CHECK(empirical_entropy(std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7}) == Catch::Approx(3.0));
  CHECK_THROWS_AS(empirical_entropy(std::vector<std::uint32_t>{}), UsageError);
}
