#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "csgt/error.hpp"
#include "csgt/image.hpp"
#include "csgt/prng.hpp"

namespace csgt {

/// Seeded Gaussian measurement matrix, entries i.i.d. N(0, 1/M).
///
/// Entries are drawn in row-major order from `Prng(seed)` and scaled by
/// 1/sqrt(M), so a decoder that knows (seed, M, N, prng id) regenerates the
/// matrix bit-for-bit.
struct MeasurementMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd entries;

  // More measurements than unknowns; allowed but not compressive.
  bool oversampled() const { return rows > cols; }
};

inline MeasurementMatrix generate_matrix(std::uint64_t seed, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw UsageError("measurement matrix needs m >= 1 and n >= 1");
  MeasurementMatrix phi{m, n, seed, Eigen::MatrixXd(m, n)};
  Prng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      phi.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal() * scale;
  return phi;
}

// Measurements per block for a sampling rate: round(sr * b^2), clamped to [1, b^2].
inline std::size_t measurements_per_block(double sampling_rate, std::size_t block_size) {
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0))
    throw UsageError("sampling rate must be in (0, 1]");
  const std::size_t n = block_size * block_size;
  const auto m = static_cast<std::size_t>(std::llround(sampling_rate * static_cast<double>(n)));
  return std::clamp<std::size_t>(m, 1, n);
}

enum class MeasurementRole : std::uint8_t {
  kRaw,               // y = Phi x
  kTransformed,       // y' = Phi (x - a)
  kOffset,            // y_a = Phi a
  kDequantizedShift,  // y-hat' from the quantizer
  kDequantized,       // y-hat = y-hat' + y_a
};

struct MeasurementVector {
  Eigen::VectorXd values;
  MeasurementRole role = MeasurementRole::kRaw;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

inline MeasurementVector sample_block(const MeasurementMatrix& phi, std::span<const double> block,
                                      MeasurementRole role = MeasurementRole::kRaw) {
  if (block.size() != phi.cols) throw UsageError("block length does not match matrix columns");
  const Eigen::Map<const Eigen::VectorXd> x(block.data(), static_cast<Eigen::Index>(block.size()));
  return {phi.entries * x, role};
}

// Samples every column of `blocks` at once: returns Phi * blocks (M x K).
inline Eigen::MatrixXd sample_blocks(const MeasurementMatrix& phi, const Eigen::MatrixXd& blocks) {
  if (static_cast<std::size_t>(blocks.rows()) != phi.cols)
    throw UsageError("block length does not match matrix columns");
  return phi.entries * blocks;
}

// ---------------------------------------------------------------------------
// Scrambling

/// Bijection on pixel indices: scrambled[i] = original[source[i]].
struct Permutation {
  std::vector<std::uint32_t> source;

  std::size_t size() const { return source.size(); }
};

// Seeded Fisher-Yates shuffle of the identity.
inline Permutation make_permutation(std::size_t n, std::uint64_t seed) {
  if (n > UINT32_MAX) throw UsageError("permutation too large");
  Permutation p;
  p.source.resize(n);
  std::iota(p.source.begin(), p.source.end(), 0u);
  Prng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(p.source[i - 1], p.source[j]);
  }
  return p;
}

struct ScrambledImage {
  Image image;
  Permutation permutation;
};

inline ScrambledImage scramble(const Image& img, std::uint64_t seed) {
  ScrambledImage out{Image(img.width(), img.height()), make_permutation(img.size(), seed)};
  const auto src = img.pixels();
  auto dst = out.image.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[out.permutation.source[i]];
  return out;
}

inline Image unscramble(const Image& scrambled, const Permutation& perm) {
  if (perm.size() != scrambled.size()) throw UsageError("permutation size mismatch");
  Image out(scrambled.width(), scrambled.height());
  const auto src = scrambled.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[perm.source[i]] = src[i];
  return out;
}

inline Image unscramble(const Image& scrambled, std::uint64_t seed) {
  return unscramble(scrambled, make_permutation(scrambled.size(), seed));
}

// ---------------------------------------------------------------------------
// Partitioning

/// Geometry of a block partition. Blocks are ordered row-major over the block
/// grid; within a block, pixels are stacked column by column.
struct BlockGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t block_size = 0;

  std::size_t blocks_across() const { return (width + block_size - 1) / block_size; }
  std::size_t blocks_down() const { return (height + block_size - 1) / block_size; }
  std::size_t block_count() const { return blocks_across() * blocks_down(); }
  std::size_t block_length() const { return block_size * block_size; }
  std::size_t padded_width() const { return blocks_across() * block_size; }
  std::size_t padded_height() const { return blocks_down() * block_size; }

  // Row-major pixel index (in the padded image) of element j of block k.
  std::size_t pixel_index(std::size_t k, std::size_t j) const {
    const std::size_t by = k / blocks_across(), bx = k % blocks_across();
    const std::size_t col = bx * block_size + j / block_size;
    const std::size_t row = by * block_size + j % block_size;
    return row * padded_width() + col;
  }
};

struct BlockPartition {
  BlockGrid grid;
  Eigen::MatrixXd blocks;  // block_length x block_count, one column per block

  std::size_t size() const { return static_cast<std::size_t>(blocks.cols()); }
  std::span<const double> block(std::size_t k) const {
    return {blocks.col(static_cast<Eigen::Index>(k)).data(), grid.block_length()};
  }
};

// Extends the image to multiples of block_size by repeating the last row/column.
inline Image pad_replicate(const Image& img, std::size_t block_size) {
  const BlockGrid grid{img.width(), img.height(), block_size};
  Image out(grid.padded_width(), grid.padded_height());
  for (std::size_t r = 0; r < out.height(); ++r)
    for (std::size_t c = 0; c < out.width(); ++c)
      out.at(r, c) = img.at(std::min(r, img.height() - 1), std::min(c, img.width() - 1));
  return out;
}

inline BlockPartition partition(const Image& img, std::size_t block_size) {
  if (block_size == 0) throw UsageError("block size must be at least 1");
  const Image padded = pad_replicate(img, block_size);
  BlockPartition part{BlockGrid{img.width(), img.height(), block_size}, {}};
  const auto& g = part.grid;
  part.blocks.resize(static_cast<Eigen::Index>(g.block_length()),
                     static_cast<Eigen::Index>(g.block_count()));
  const auto px = padded.pixels();
  for (std::size_t k = 0; k < g.block_count(); ++k)
    for (std::size_t j = 0; j < g.block_length(); ++j)
      part.blocks(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = px[g.pixel_index(k, j)];
  return part;
}

// Inverse of partition(): rebuilds the padded image from block columns.
inline Image assemble_padded(const Eigen::MatrixXd& blocks, const BlockGrid& g) {
  if (static_cast<std::size_t>(blocks.rows()) != g.block_length() ||
      static_cast<std::size_t>(blocks.cols()) != g.block_count())
    throw UsageError("block matrix does not match grid");
  Image out(g.padded_width(), g.padded_height());
  auto px = out.pixels();
  for (std::size_t k = 0; k < g.block_count(); ++k)
    for (std::size_t j = 0; j < g.block_length(); ++j)
      px[g.pixel_index(k, j)] = blocks(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  return out;
}

}  // namespace csgt
