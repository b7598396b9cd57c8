#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "csgt/basis.hpp"
#include "csgt/error.hpp"
#include "csgt/image.hpp"
#include "csgt/sensing.hpp"

namespace csgt {

enum class ProjectionMode {
  // x += Phi^T (Phi Phi^T)^-1 (y - Phi x): lands exactly on {x : Phi x = y}.
  kExact,
  // x += Phi^T (y - Phi x) / sigma_max^2, sigma_max from power iteration.
  kLandweber,
};

/// How the hard threshold evolves over the iterations.
struct ThresholdSchedule {
  enum class Kind {
    // lambda_i = scale * sqrt(2 ln K) * sigma_i, where sigma_i = median|finest detail| / 0.6745
    // is re-estimated from each iterate and K is the pixel count.
    kUniversal,
    // lambda_i = max(floor, scale * MAD_0 * decay^i), MAD_0 from the first iterate's detail coefficients.
    kDecaying,
  };
  Kind kind = Kind::kUniversal;
  double scale = 0.5;
  double decay = 0.97;
  double floor = 0.0;
};

struct SolverConfig {
  int max_iterations = 200;
  double convergence_tol = 1e-4;  // relative change between successive iterates
  ThresholdSchedule threshold;
  std::size_t smoothing_window = 3;  // Wiener window side; 0 or 1 disables smoothing
  ProjectionMode projection = ProjectionMode::kExact;
  int power_iterations = 10;  // Landweber step-size estimate

  void validate() const {
    if (max_iterations < 1) throw UsageError("max_iterations must be at least 1");
    if (!(convergence_tol > 0.0)) throw UsageError("convergence tolerance must be positive");
    if (smoothing_window % 2 == 0 && smoothing_window > 1)
      throw UsageError("smoothing window must be odd");
  }
};

/// Blockwise measurement operator on a padded, natural-order image.
///
/// Block k of the scrambled image holds pixels source[pixel_index(k, j)] of
/// the natural image, so the operator is gather -> Phi per column, and its
/// adjoint is Phi^T per column -> scatter.
class BlockOperator {
 public:
  BlockOperator(const MeasurementMatrix& phi, const BlockGrid& grid, const Permutation* scramble,
                ProjectionMode mode = ProjectionMode::kExact, int power_iterations = 10)
      : phi_(phi.entries), grid_(grid) {
    if (grid.padded_width() != grid.width || grid.padded_height() != grid.height)
      throw UsageError("BlockOperator expects a grid without padding");
    if (phi.cols != grid.block_length()) throw UsageError("matrix columns must equal block length");
    const std::size_t n = grid.block_length(), k = grid.block_count();
    if (scramble && scramble->size() != n * k) throw UsageError("permutation size mismatch");
    index_.resize(n * k);
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t s = grid.pixel_index(b, j);
        index_[b * n + j] = scramble ? scramble->source[s] : static_cast<std::uint32_t>(s);
      }
    build_projector(mode, power_iterations);
  }

  std::size_t width() const { return grid_.width; }
  std::size_t height() const { return grid_.height; }
  const Eigen::MatrixXd& phi() const { return phi_; }

  Eigen::MatrixXd gather(const Image& x) const {
    const std::size_t n = grid_.block_length(), k = grid_.block_count();
    Eigen::MatrixXd blocks(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    const auto px = x.pixels();
    double* dst = blocks.data();
    for (std::size_t i = 0; i < n * k; ++i) dst[i] = px[index_[i]];
    return blocks;
  }

  Image scatter(const Eigen::MatrixXd& blocks) const {
    Image x(grid_.width, grid_.height);
    auto px = x.pixels();
    const double* src = blocks.data();
    for (std::size_t i = 0; i < index_.size(); ++i) px[index_[i]] = src[i];
    return x;
  }

  Eigen::MatrixXd apply(const Image& x) const { return phi_ * gather(x); }

  Image adjoint(const Eigen::MatrixXd& y) const { return scatter(phi_.transpose() * y); }

  // One projection step toward {x : A x = y}.
  Image project(const Image& x, const Eigen::MatrixXd& y) const {
    Eigen::MatrixXd blocks = gather(x);
    blocks.noalias() += projector_ * (y - phi_ * blocks);
    return scatter(blocks);
  }

  // Frobenius norm of y - A x.
  double residual(const Image& x, const Eigen::MatrixXd& y) const { return (y - apply(x)).norm(); }

  double step_scale() const { return step_scale_; }

 private:
  void build_projector(ProjectionMode mode, int power_iterations) {
    if (mode == ProjectionMode::kLandweber) {
      // Power iteration on Phi^T Phi from a fixed start vector.
      Eigen::VectorXd v = Eigen::VectorXd::Ones(phi_.cols()).normalized();
      double sigma2 = 1.0;
      for (int i = 0; i < std::max(power_iterations, 1); ++i) {
        Eigen::VectorXd w = phi_.transpose() * (phi_ * v);
        sigma2 = w.norm();
        v = w / sigma2;
      }
      step_scale_ = 1.0 / sigma2;
      projector_ = phi_.transpose() * step_scale_;
    } else if (phi_.rows() <= phi_.cols()) {
      const Eigen::MatrixXd gram = phi_ * phi_.transpose();
      projector_ = gram.llt().solve(phi_).transpose();
    } else {
      projector_ = phi_.completeOrthogonalDecomposition().pseudoInverse();
    }
  }

  Eigen::MatrixXd phi_;
  Eigen::MatrixXd projector_;  // N x M
  BlockGrid grid_;
  std::vector<std::uint32_t> index_;
  double step_scale_ = 1.0;
};

// ---------------------------------------------------------------------------

/// Adaptive local-statistics (Wiener) smoothing with a square window.
///
/// out = mu + max(0, s2 - v) / max(s2, v) * (x - mu), where mu and s2 are the
/// local mean and variance and v is the mean local variance over the image.
/// Borders replicate the edge pixels.
inline Image wiener_smooth(const Image& x, std::size_t window) {
  if (window <= 1) return x;
  const std::size_t w = x.width(), h = x.height();
  const auto half = static_cast<long>(window / 2);
  const double area = static_cast<double>(window * window);
  Image mean(w, h), var(w, h);
  double noise = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0, s2 = 0.0;
      for (long dr = -half; dr <= half; ++dr) {
        const auto rr = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(r) + dr, 0, static_cast<long>(h) - 1));
        for (long dc = -half; dc <= half; ++dc) {
          const auto cc = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(c) + dc, 0, static_cast<long>(w) - 1));
          const double v = x.at(rr, cc);
          s += v;
          s2 += v * v;
        }
      }
      const double mu = s / area;
      const double v = std::max(s2 / area - mu * mu, 0.0);
      mean.at(r, c) = mu;
      var.at(r, c) = v;
      noise += v;
    }
  }
  noise /= static_cast<double>(w * h);
  Image out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mu = mean.pixels()[i], v = var.pixels()[i];
    const double denom = std::max(v, noise);
    const double gain = denom > 0.0 ? std::max(v - noise, 0.0) / denom : 0.0;
    out.pixels()[i] = mu + gain * (x.pixels()[i] - mu);
  }
  return out;
}

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Median |c| over the finest detail band, scaled to a Gaussian sigma.
inline double estimate_noise_sigma(const Image& coeffs, const SparsityBasis& basis) {
  std::vector<double> band;
  for (std::size_t r = 0; r < coeffs.height(); ++r)
    for (std::size_t c = 0; c < coeffs.width(); ++c)
      if (basis.is_finest_detail(r, c)) band.push_back(std::abs(coeffs.at(r, c)));
  return detail::median_of(std::move(band)) / 0.6745;
}

// Median absolute deviation of all detail (non-approximation) coefficients.
inline double detail_mad(const Image& coeffs, const SparsityBasis& basis) {
  std::vector<double> d;
  for (std::size_t r = 0; r < coeffs.height(); ++r)
    for (std::size_t c = 0; c < coeffs.width(); ++c)
      if (!basis.is_approximation(r, c)) d.push_back(coeffs.at(r, c));
  const double med = detail::median_of(d);
  for (double& v : d) v = std::abs(v - med);
  return detail::median_of(std::move(d));
}

inline void hard_threshold(Image& coeffs, const SparsityBasis& basis, double lambda) {
  for (std::size_t r = 0; r < coeffs.height(); ++r)
    for (std::size_t c = 0; c < coeffs.width(); ++c)
      if (!basis.is_approximation(r, c) && std::abs(coeffs.at(r, c)) < lambda) coeffs.at(r, c) = 0.0;
}

/// Threshold for iteration `iteration` (0-based) given the smoothed,
/// projected iterate's coefficients. `mad0` carries the first iteration's
/// MAD for the decaying schedule.
inline double threshold_for(const ThresholdSchedule& s, int iteration, const Image& coeffs,
                            const SparsityBasis& basis, double& mad0) {
  if (s.kind == ThresholdSchedule::Kind::kUniversal) {
    const double k = static_cast<double>(coeffs.size());
    return s.scale * std::sqrt(2.0 * std::log(k)) * estimate_noise_sigma(coeffs, basis);
  }
  if (iteration == 0) mad0 = detail_mad(coeffs, basis);
  return std::max(s.floor, s.scale * mad0 * std::pow(s.decay, iteration));
}

struct SplStep {
  Image estimate;
  Image smoothed;     // after Wiener smoothing + first projection
  Image thresholded;  // after hard thresholding, before the second projection
};

/// One smoothed projected Landweber sweep: Wiener smoothing, projection,
/// basis-domain hard threshold at lambda, projection.
inline SplStep spl_step(const Image& x, const Eigen::MatrixXd& y, const BlockOperator& op,
                        const SparsityBasis& basis, double lambda, std::size_t smoothing_window) {
  SplStep s;
  s.smoothed = op.project(wiener_smooth(x, smoothing_window), y);
  Image coeffs = basis.forward(s.smoothed);
  hard_threshold(coeffs, basis, lambda);
  s.thresholded = basis.inverse(coeffs);
  s.estimate = op.project(s.thresholded, y);
  return s;
}

inline Image spl_iteration(const Image& x, const Eigen::MatrixXd& y, const BlockOperator& op,
                           const SparsityBasis& basis, double lambda, std::size_t smoothing_window = 3) {
  return spl_step(x, y, op, basis, lambda, smoothing_window).estimate;
}

struct ReconstructionResult {
  Image image;              // cropped, clamped to [0, 255]
  Image raw;                // final padded iterate, unclamped
  int iterations = 0;
  bool converged = false;   // false: hit max_iterations, last iterate returned
  std::vector<double> residual_history;   // ||y - A x|| after each sweep
  std::vector<double> threshold_history;  // lambda used in each sweep
};

/// Runs SPL from the minimum-norm start P y on a padded natural-order image.
/// y holds one column of M measurements per block.
inline ReconstructionResult reconstruct_padded(const Eigen::MatrixXd& y, const BlockOperator& op,
                                               const SparsityBasis& basis, const SolverConfig& cfg) {
  cfg.validate();
  if (y.rows() != op.phi().rows() ||
      static_cast<std::size_t>(y.cols()) * static_cast<std::size_t>(op.phi().cols()) !=
          op.width() * op.height())
    throw UsageError("measurement matrix shape does not match the operator");

  ReconstructionResult res;
  Image x = op.project(Image(op.width(), op.height()), y);
  double mad0 = 0.0;
  for (int i = 0; i < cfg.max_iterations; ++i) {
    const Image smoothed = op.project(wiener_smooth(x, cfg.smoothing_window), y);
    Image coeffs = basis.forward(smoothed);
    const double lambda = threshold_for(cfg.threshold, i, coeffs, basis, mad0);
    hard_threshold(coeffs, basis, lambda);
    Image next = op.project(basis.inverse(coeffs), y);

    double diff = 0.0, norm = 0.0;
    for (std::size_t p = 0; p < x.size(); ++p) {
      const double d = next.pixels()[p] - x.pixels()[p];
      diff += d * d;
      norm += x.pixels()[p] * x.pixels()[p];
    }
    x = std::move(next);
    res.iterations = i + 1;
    res.threshold_history.push_back(lambda);
    res.residual_history.push_back(op.residual(x, y));
    if (diff <= cfg.convergence_tol * cfg.convergence_tol * norm) {
      res.converged = true;
      break;
    }
  }
  res.raw = x;
  return res;
}

// Crops to width x height and clamps to the 8-bit range.
inline Image finalize_image(const Image& padded, std::size_t width, std::size_t height) {
  Image out = crop(padded, width, height);
  for (double& p : out.pixels()) p = std::clamp(p, 0.0, 255.0);
  return out;
}

/// Full decoder-side recovery: y-hat (one column per block, measurements of
/// the original image) back to a cropped 8-bit-range image. `grid` carries
/// the original dimensions; `scramble` permutes the padded image, and the
/// basis must be sized to the padded dimensions.
inline ReconstructionResult reconstruct(const Eigen::MatrixXd& y_hat, const MeasurementMatrix& phi,
                                        const BlockGrid& grid, const Permutation* scramble,
                                        const SparsityBasis& basis, const SolverConfig& cfg) {
  const BlockGrid padded{grid.padded_width(), grid.padded_height(), grid.block_size};
  if (static_cast<std::size_t>(y_hat.rows()) != phi.rows ||
      static_cast<std::size_t>(y_hat.cols()) != padded.block_count())
    throw UsageError("measurements do not match matrix rows and block count");
  const BlockOperator op(phi, padded, scramble, cfg.projection, cfg.power_iterations);
  ReconstructionResult res = reconstruct_padded(y_hat, op, basis, cfg);
  res.image = finalize_image(res.raw, grid.width, grid.height);
  return res;
}

}  // namespace csgt
