#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "csgt/basis.hpp"
#include "csgt/bitstream.hpp"
#include "csgt/error.hpp"
#include "csgt/gray_transform.hpp"
#include "csgt/huffman.hpp"
#include "csgt/image.hpp"
#include "csgt/quantizer.hpp"
#include "csgt/reconstruction.hpp"
#include "csgt/sensing.hpp"

namespace csgt {

enum class Scheme {
  kSbcs,    // scrambled block CS, no gray transformation (a = 0)
  kSbcsGt,  // gray transformation with a = image mean, then SBCS
};

inline const char* scheme_name(Scheme s) { return s == Scheme::kSbcs ? "SBCS" : "SBCS-GT"; }

inline constexpr int kLossless = 0;

struct EncoderConfig {
  double sampling_rate = 0.5;
  int bit_depth = 6;  // kLossless stores y' as raw float32
  std::size_t block_size = 32;
  std::uint64_t matrix_seed = 2021;
  std::uint64_t scramble_seed = 2022;
  Scheme scheme = Scheme::kSbcsGt;

  // Overrides round(sr * b^2) when nonzero.
  std::size_t measurements = 0;

  std::size_t measurements_per_block() const {
    if (measurements != 0) {
      if (measurements > block_size * block_size)
        throw UsageError("measurements per block exceed block_size^2");
      return measurements;
    }
    return csgt::measurements_per_block(sampling_rate, block_size);
  }

  void validate() const {
    if (block_size == 0 || block_size > 255) throw UsageError("block size must be in [1, 255]");
    if (bit_depth != kLossless && (bit_depth < kMinBitDepth || bit_depth > kMaxBitDepth))
      throw UsageError("bit depth must be in [1, 16] or lossless");
    measurements_per_block();
  }
};

/// Encoder output plus the intermediate signals the harness reports on.
struct EncodedImage {
  Bitstream stream;
  std::vector<std::uint8_t> bytes;
  GrayConstant gray_constant;
  Eigen::MatrixXd transformed;  // y' = Phi (x - a), one column per block
  std::vector<std::uint32_t> indices;  // empty when lossless
  QuantizerConfig quantizer;
};

namespace detail {

// Gray transform, pad, scramble and partition: the encoder's view of the image.
inline BlockPartition prepare_blocks(const Image& img, GrayConstant a, std::size_t block_size,
                                     std::uint64_t scramble_seed) {
  const Image shifted = forward_transform(img, a);
  const Image padded = pad_replicate(shifted, block_size);
  const ScrambledImage scrambled = scramble(padded, scramble_seed);
  BlockPartition part = partition(scrambled.image, block_size);
  part.grid = BlockGrid{img.width(), img.height(), block_size};
  return part;
}

inline std::vector<double> column_major_values(const Eigen::MatrixXd& m) {
  return {m.data(), m.data() + m.size()};
}

}  // namespace detail

inline EncodedImage encode(const Image& img, const EncoderConfig& cfg) {
  cfg.validate();
  img.validate_pixel_range();
  if (img.width() > 65535 || img.height() > 65535) throw UsageError("image exceeds 65535 pixels per side");

  EncodedImage enc;
  enc.gray_constant = cfg.scheme == Scheme::kSbcsGt ? optimal_constant(img) : GrayConstant{0.0};
  const std::size_t m = cfg.measurements_per_block();
  const BlockPartition part =
      detail::prepare_blocks(img, enc.gray_constant, cfg.block_size, cfg.scramble_seed);
  const MeasurementMatrix phi = generate_matrix(cfg.matrix_seed, m, part.grid.block_length());
  enc.transformed = sample_blocks(phi, part.blocks);

  auto& h = enc.stream.header;
  h.width = static_cast<std::uint16_t>(img.width());
  h.height = static_cast<std::uint16_t>(img.height());
  h.block_size = static_cast<std::uint8_t>(cfg.block_size);
  h.measurements = static_cast<std::uint16_t>(m);
  h.bit_depth = static_cast<std::uint8_t>(cfg.bit_depth);
  h.matrix_seed = cfg.matrix_seed;
  h.scramble_seed = cfg.scramble_seed;
  h.prng_id = static_cast<std::uint8_t>(Prng::kId);
  h.gray_constant = enc.gray_constant.as_float();

  const std::vector<double> samples = detail::column_major_values(enc.transformed);
  if (cfg.bit_depth == kLossless) {
    BitWriter w;
    for (double v : samples) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int byte = 0; byte < 4; ++byte) w.put((bits >> (8 * byte)) & 0xffu, 8);
    }
    enc.stream.payload = std::move(w).finish();
  } else {
    enc.quantizer = fit_range(samples, cfg.bit_depth);
    h.q_lower = static_cast<float>(enc.quantizer.lower);
    h.q_upper = static_cast<float>(enc.quantizer.upper);
    enc.indices = quantize(samples, enc.quantizer).indices;
    const HuffmanTable table = build_table(histogram_of(enc.indices, enc.quantizer.levels()));
    enc.stream.code_lengths.assign(table.lengths().begin(), table.lengths().end());
    enc.stream.payload = encode_indices(enc.indices, table);
  }
  enc.bytes = write_bitstream(enc.stream);
  return enc;
}

/// Decoder state derived from the header alone.
struct DecoderSetup {
  MeasurementMatrix phi;
  BlockGrid grid;  // original dimensions
  Permutation scramble;
  GrayConstant gray_constant;
};

inline DecoderSetup decoder_setup(const StreamHeader& h) {
  h.validate();
  DecoderSetup s;
  s.grid = BlockGrid{h.width, h.height, h.block_size};
  s.phi = generate_matrix(h.matrix_seed, h.measurements, s.grid.block_length());
  s.scramble = make_permutation(s.grid.padded_width() * s.grid.padded_height(), h.scramble_seed);
  s.gray_constant = GrayConstant::from_float(h.gray_constant);
  return s;
}

/// Dequantized measurements of the transformed image, y-hat' (M x K).
inline Eigen::MatrixXd decode_transformed(const Bitstream& bs) {
  const auto& h = bs.header;
  const auto m = static_cast<Eigen::Index>(h.measurements);
  const auto k = static_cast<Eigen::Index>(h.block_count());
  Eigen::MatrixXd y(m, k);
  double* out = y.data();
  const std::size_t count = h.sample_count();
  if (h.lossless()) {
    if (bs.payload.bit_count != 32ull * count) throw DataError("lossless payload size mismatch");
    const auto& b = bs.payload.bytes;
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint32_t bits = std::uint32_t{b[4 * i]} | std::uint32_t{b[4 * i + 1]} << 8 |
                                 std::uint32_t{b[4 * i + 2]} << 16 | std::uint32_t{b[4 * i + 3]} << 24;
      out[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    return y;
  }
  const QuantizerConfig q{h.bit_depth, h.q_lower, h.q_upper};
  const HuffmanTable table(bs.code_lengths);
  const auto indices = decode_indices(bs.payload, table, count);
  for (std::size_t i = 0; i < count; ++i) out[i] = dequantize_value(indices[i], q);
  return y;
}

/// y-hat = y-hat' + Phi (a 1) for every block.
inline Eigen::MatrixXd add_offset(const Eigen::MatrixXd& y_hat_prime, const MeasurementMatrix& phi,
                                  GrayConstant a) {
  const MeasurementVector y_a = measurement_offset(phi, a);
  return y_hat_prime.colwise() + y_a.values;
}

struct DecoderConfig {
  SolverConfig solver;
  BasisKind basis = BasisKind::kWavelet;
  std::string wavelet = "db2";
  std::size_t wavelet_levels = 4;
};

struct DecodedImage {
  ReconstructionResult result;
  Eigen::MatrixXd measurements;  // y-hat
};

inline DecodedImage decode(const Bitstream& bs, const DecoderConfig& cfg = {}) {
  const DecoderSetup s = decoder_setup(bs.header);
  DecodedImage d;
  d.measurements = add_offset(decode_transformed(bs), s.phi, s.gray_constant);
  const auto basis = make_basis(cfg.basis, s.grid.padded_width(), s.grid.padded_height(),
                                s.grid.block_size, cfg.wavelet, cfg.wavelet_levels);
  d.result = reconstruct(d.measurements, s.phi, s.grid, &s.scramble, *basis, cfg.solver);
  return d;
}

inline DecodedImage decode(std::span<const std::uint8_t> bytes, const DecoderConfig& cfg = {}) {
  return decode(read_bitstream(bytes), cfg);
}

}  // namespace csgt
