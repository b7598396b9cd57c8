#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "csgt/basis.hpp"
#include "csgt/metrics.hpp"
#include "csgt/reconstruction.hpp"
#include "support.hpp"

using namespace csgt;

namespace {

// Solves G z = r by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> g, std::vector<double> r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(g[i][c]) > std::abs(g[p][c])) p = i;
    std::swap(g[c], g[p]);
    std::swap(r[c], r[p]);
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = g[i][c] / g[c][c];
      for (std::size_t j = c; j < n; ++j) g[i][j] -= f * g[c][j];
      r[i] -= f * r[c];
    }
  }
  std::vector<double> z(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = r[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= g[i][j] * z[j];
    z[i] = s / g[i][i];
  }
  return z;
}

SolverConfig quick_solver() {
  SolverConfig cfg;
  cfg.max_iterations = 60;
  return cfg;
}

double decode_psnr(const Image& img, double sr, std::uint64_t seed, const SolverConfig& cfg) {
  const std::size_t b = 16;
  const BlockGrid grid{img.width(), img.height(), b};
  const auto phi = generate_matrix(seed, measurements_per_block(sr, b), b * b);
  const auto perm = make_permutation(img.size(), seed + 1);
  const auto blocks = partition(scramble(img, seed + 1).image, b).blocks;
  const WaveletBasis basis(img.width(), img.height(), 3);
  const auto res = reconstruct(sample_blocks(phi, blocks), phi, grid, &perm, basis, cfg);
  return psnr(img, res.image);
}

}  // namespace

TEST_CASE("one sweep with no threshold and no smoothing is the minimum-norm solution") {
  // 4x4 image, 2x2 blocks, 2 measurements per block, no scrambling.
  const Image x = testing::random_image(4, 4, 1);
  const BlockGrid grid{4, 4, 2};
  const auto phi = generate_matrix(3, 2, 4);
  const BlockOperator op(phi, grid, nullptr);
  const Eigen::MatrixXd y = op.apply(x);

  const Image got = spl_iteration(Image(4, 4), y, op, WaveletBasis(4, 4, 1), 0.0, 1);

  // Oracle: per block, z = Phi^T (Phi Phi^T)^-1 y_k, placed column-stacked.
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<std::vector<double>> g(2, std::vector<double>(2, 0.0));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int c = 0; c < 4; ++c) g[i][j] += phi.entries(i, c) * phi.entries(j, c);
    const auto w = solve(g, {y(0, static_cast<Eigen::Index>(k)), y(1, static_cast<Eigen::Index>(k))});
    const std::size_t by = k / 2, bx = k % 2;
    for (int c = 0; c < 4; ++c) {
      const double z = phi.entries(0, c) * w[0] + phi.entries(1, c) * w[1];
      const std::size_t row = by * 2 + c % 2, col = bx * 2 + c / 2;
      CHECK(got.at(row, col) == Catch::Approx(z).margin(1e-10));
    }
  }
}

TEST_CASE("operator and adjoint agree, projection lands on the constraint set") {
  const BlockGrid grid{16, 16, 8};
  const auto phi = generate_matrix(5, 20, 64);
  const auto perm = make_permutation(256, 6);
  const BlockOperator op(phi, grid, &perm);
  const Image x = testing::random_image(16, 16, 2);
  Eigen::MatrixXd y = Eigen::MatrixXd::Random(20, 4);

  const Eigen::MatrixXd ax = op.apply(x);
  const Image aty = op.adjoint(y);
  double lhs = (ax.array() * y.array()).sum(), rhs = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x.pixels()[i] * aty.pixels()[i];
  CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10));

  const Image p = op.project(x, y);
  CHECK(op.residual(p, y) < 1e-9 * y.norm());
  // Projecting twice changes nothing.
  const Image pp = op.project(p, y);
  for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(pp.pixels()[i] == Catch::Approx(p.pixels()[i]).margin(1e-9));

  // Scrambled operator equals: scramble, partition, sample.
  const auto blocks = partition(scramble(x, 6).image, 8).blocks;
  CHECK((sample_blocks(phi, blocks) - ax).norm() < 1e-9 * ax.norm());
  CHECK_THROWS_AS(BlockOperator(phi, BlockGrid{15, 16, 8}, nullptr), UsageError);
}

TEST_CASE("Landweber projection reduces the residual") {
  const BlockGrid grid{16, 16, 8};
  const auto phi = generate_matrix(5, 20, 64);
  const BlockOperator op(phi, grid, nullptr, ProjectionMode::kLandweber, 30);
  const Image x = testing::random_image(16, 16, 3);
  const Eigen::MatrixXd y = op.apply(testing::random_image(16, 16, 4));
  CHECK(op.step_scale() > 0.0);
  CHECK(op.residual(op.project(x, y), y) < op.residual(x, y));
}

TEST_CASE("Wiener smoothing") {
  const Image flat(9, 7, 42.0);
  CHECK(wiener_smooth(flat, 3) == flat);
  const Image x = testing::random_image(9, 7, 5);
  CHECK(wiener_smooth(x, 1) == x);
  const Image s = wiener_smooth(x, 3);
  // Smoothing white noise shrinks its variance.
  CHECK(moments(s.pixels()).variance < moments(x.pixels()).variance);
}

TEST_CASE("hard threshold spares the approximation band") {
  const WaveletBasis b(16, 16, 2);
  Image c(16, 16, 1.0);
  hard_threshold(c, b, 5.0);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t col = 0; col < 16; ++col) CHECK(c.at(r, col) == (b.is_approximation(r, col) ? 1.0 : 0.0));
}

TEST_CASE("noise estimate recovers the sigma of white noise") {
  Prng rng(8);
  Image x(128, 128);
  for (double& p : x.pixels()) p = 7.0 * rng.normal();
  const WaveletBasis b(128, 128, 4);
  CHECK(estimate_noise_sigma(b.forward(x), b) == Catch::Approx(7.0).epsilon(0.1));
  CHECK(detail::median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(detail::median_of({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("thresholds follow their schedule") {
  Prng rng(9);
  Image c(64, 64);
  for (double& p : c.pixels()) p = rng.normal();
  const WaveletBasis b(64, 64, 3);
  double mad0 = 0.0;
  ThresholdSchedule s;
  s.kind = ThresholdSchedule::Kind::kDecaying;
  s.scale = 3.0;
  s.decay = 0.5;
  const double l0 = threshold_for(s, 0, c, b, mad0);
  CHECK(mad0 > 0.0);
  CHECK(threshold_for(s, 2, Image(64, 64), b, mad0) == Catch::Approx(l0 / 4));
  s.kind = ThresholdSchedule::Kind::kUniversal;
  s.scale = 1.0;
  CHECK(threshold_for(s, 0, c, b, mad0) ==
        Catch::Approx(std::sqrt(2.0 * std::log(4096.0)) * estimate_noise_sigma(c, b)));
}

TEST_CASE("a zero image reconstructs exactly") {
  const Image zero(32, 32, 0.0);
  const BlockGrid grid{32, 32, 16};
  const auto phi = generate_matrix(1, 64, 256);
  const auto res = reconstruct(Eigen::MatrixXd::Zero(64, 4), phi, grid, nullptr, WaveletBasis(32, 32, 3),
                               quick_solver());
  CHECK(psnr(zero, res.image) == std::numeric_limits<double>::infinity());
  CHECK(res.converged);
}

TEST_CASE("full sampling reconstructs essentially perfectly") {
  const Image img = testing::synthetic_image(48, 48);
  CHECK(decode_psnr(img, 1.0, 3, quick_solver()) > 50.0);
}

TEST_CASE("quality improves with the sampling rate") {
  const Image img = testing::synthetic_image(64, 64);
  const double p2 = decode_psnr(img, 0.2, 4, quick_solver());
  const double p4 = decode_psnr(img, 0.4, 4, quick_solver());
  const double p7 = decode_psnr(img, 0.7, 4, quick_solver());
  CHECK(p2 < p4);
  CHECK(p4 < p7);
  CHECK(p2 > 20.0);
}

TEST_CASE("iterates stay consistent with the measurements") {
  const Image img = testing::synthetic_image(32, 32, 2);
  const BlockGrid grid{32, 32, 16};
  const auto phi = generate_matrix(2, 96, 256);
  const BlockOperator op(phi, grid, nullptr);
  const Eigen::MatrixXd y = op.apply(img);
  const auto res = reconstruct_padded(y, op, WaveletBasis(32, 32, 3), quick_solver());
  REQUIRE(res.iterations >= 1);
  REQUIRE(res.residual_history.size() == static_cast<std::size_t>(res.iterations));
  for (double r : res.residual_history) CHECK(r < 1e-8 * y.norm());
  for (double l : res.threshold_history) CHECK(l >= 0.0);
  CHECK(psnr(img, finalize_image(res.raw, 32, 32)) > psnr(img, finalize_image(op.project(Image(32, 32), y), 32, 32)));
}

TEST_CASE("reconstruction is deterministic") {
  const Image img = testing::synthetic_image(32, 32, 3);
  const BlockGrid grid{32, 32, 16};
  const auto phi = generate_matrix(2, 64, 256);
  const auto perm = make_permutation(1024, 11);
  const auto y = sample_blocks(phi, partition(scramble(img, 11).image, 16).blocks);
  const WaveletBasis b(32, 32, 3);
  const auto r1 = reconstruct(y, phi, grid, &perm, b, quick_solver());
  const auto r2 = reconstruct(y, phi, grid, &perm, b, quick_solver());
  CHECK(r1.raw == r2.raw);
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("solver configuration is validated") {
  SolverConfig cfg;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.smoothing_window = 4;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.convergence_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}
