#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "csgt/error.hpp"
#include "csgt/huffman.hpp"
#include "csgt/metrics.hpp"
#include "csgt/prng.hpp"

namespace csgt {

inline constexpr std::array<std::uint8_t, 4> kMagic = {'C', 'S', 'G', 'T'};
inline constexpr std::uint8_t kFormatVersion = 1;
// magic(4) version(1) width(2) height(2) block(1) M(2) bits(1) seeds(16) prng(1) floats(12)
inline constexpr std::size_t kFixedHeaderBytes = 42;
inline constexpr std::size_t kBitCountBytes = 4;

/// Everything a decoder needs to rebuild Phi, the permutation, a and the quantizer.
///
/// bit_depth == 0 marks a lossless stream: the payload holds the transformed
/// measurements as little-endian float32 and there is no code-length table.
struct StreamHeader {
  std::uint8_t version = kFormatVersion;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint8_t block_size = 32;
  std::uint16_t measurements = 0;  // M per block
  std::uint8_t bit_depth = 0;
  std::uint64_t matrix_seed = 0;
  std::uint64_t scramble_seed = 0;
  std::uint8_t prng_id = static_cast<std::uint8_t>(PrngId::kMt64BoxMullerV1);
  float gray_constant = 0.0f;
  float q_lower = 0.0f;
  float q_upper = 0.0f;

  bool lossless() const { return bit_depth == 0; }
  std::size_t table_size() const { return lossless() ? 0 : std::size_t{1} << bit_depth; }

  std::size_t block_count() const {
    const std::size_t across = (width + block_size - 1u) / block_size;
    const std::size_t down = (height + block_size - 1u) / block_size;
    return across * down;
  }
  std::size_t sample_count() const { return block_count() * measurements; }

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;

  // Throws DataError on any field combination a decoder could not honor.
  void validate() const {
    if (version != kFormatVersion) throw DataError("unsupported bitstream version");
    if (prng_id != static_cast<std::uint8_t>(PrngId::kMt64BoxMullerV1))
      throw DataError("unknown PRNG identifier");
    if (width == 0 || height == 0) throw DataError("zero image dimension in header");
    if (block_size == 0) throw DataError("zero block size in header");
    const std::size_t n = std::size_t{block_size} * block_size;
    if (measurements == 0 || measurements > n)
      throw DataError("measurement count must be in [1, block_size^2]");
    if (bit_depth > 16) throw DataError("bit depth exceeds 16");
    if (!std::isfinite(gray_constant)) throw DataError("non-finite gray constant");
    if (!lossless()) {
      if (!std::isfinite(q_lower) || !std::isfinite(q_upper) || !(q_lower < q_upper))
        throw DataError("invalid quantizer range in header");
    }
  }
};

struct Bitstream {
  StreamHeader header;
  std::vector<std::uint8_t> code_lengths;  // 2^bit_depth entries, empty when lossless
  PackedBits payload;

  friend bool operator==(const Bitstream& a, const Bitstream& b) {
    return a.header == b.header && a.code_lengths == b.code_lengths &&
           a.payload.bytes == b.payload.bytes && a.payload.bit_count == b.payload.bit_count;
  }
};

namespace detail {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename UInt>
  void uint(UInt v) {
    for (std::size_t i = 0; i < sizeof(UInt); ++i)
      out_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) {
    for (auto v : b) out_.push_back(v);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename UInt>
  UInt uint() {
    need(sizeof(UInt));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += sizeof(UInt);
    return static_cast<UInt>(v);
  }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DataError("bitstream truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> write_bitstream(const Bitstream& bs) {
  bs.header.validate();
  if (bs.code_lengths.size() != bs.header.table_size())
    throw UsageError("code-length table size does not match bit depth");
  if (bs.payload.bytes.size() != (bs.payload.bit_count + 7) / 8)
    throw UsageError("payload byte length does not match its bit count");
  if (bs.payload.bit_count > UINT32_MAX) throw UsageError("payload exceeds 2^32 bits");

  std::vector<std::uint8_t> out;
  out.reserve(kFixedHeaderBytes + bs.code_lengths.size() + bs.payload.bytes.size() + kBitCountBytes);
  detail::ByteWriter w(out);
  const auto& h = bs.header;
  w.bytes(kMagic);
  w.uint(h.version);
  w.uint(h.width);
  w.uint(h.height);
  w.uint(h.block_size);
  w.uint(h.measurements);
  w.uint(h.bit_depth);
  w.uint(h.matrix_seed);
  w.uint(h.scramble_seed);
  w.uint(h.prng_id);
  w.f32(h.gray_constant);
  w.f32(h.q_lower);
  w.f32(h.q_upper);
  w.bytes(bs.code_lengths);
  w.bytes(bs.payload.bytes);
  w.uint(static_cast<std::uint32_t>(bs.payload.bit_count));
  return out;
}

inline Bitstream read_bitstream(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFixedHeaderBytes + kBitCountBytes) throw DataError("bitstream shorter than header");
  detail::ByteReader r(bytes);
  const auto magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw DataError("bad magic");
  Bitstream bs;
  auto& h = bs.header;
  h.version = r.uint<std::uint8_t>();
  if (h.version != kFormatVersion) throw DataError("unsupported bitstream version");
  h.width = r.uint<std::uint16_t>();
  h.height = r.uint<std::uint16_t>();
  h.block_size = r.uint<std::uint8_t>();
  h.measurements = r.uint<std::uint16_t>();
  h.bit_depth = r.uint<std::uint8_t>();
  h.matrix_seed = r.uint<std::uint64_t>();
  h.scramble_seed = r.uint<std::uint64_t>();
  h.prng_id = r.uint<std::uint8_t>();
  h.gray_constant = r.f32();
  h.q_lower = r.f32();
  h.q_upper = r.f32();
  h.validate();

  const auto table = r.bytes(h.table_size());
  bs.code_lengths.assign(table.begin(), table.end());
  if (r.remaining() < kBitCountBytes) throw DataError("bitstream truncated");
  const auto payload = r.bytes(r.remaining() - kBitCountBytes);
  bs.payload.bytes.assign(payload.begin(), payload.end());
  bs.payload.bit_count = r.uint<std::uint32_t>();
  if (bs.payload.bytes.size() != (bs.payload.bit_count + 7) / 8)
    throw DataError("payload length disagrees with recorded bit count");
  if (h.lossless() && bs.payload.bit_count != 32ull * h.sample_count())
    throw DataError("lossless payload size disagrees with header");
  return bs;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path);
}

// ---------------------------------------------------------------------------

struct RateReport {
  double bits_per_pixel = 0.0;       // everything in the stream, header included
  double header_bits_per_pixel = 0.0;  // fixed header, table and bit-count trailer
  double payload_bits_per_pixel = 0.0;
  double average_code_length = 0.0;  // bits/sample actually spent in the payload
  double index_entropy = 0.0;        // 0 for lossless streams
  double sampling_rate = 0.0;        // total samples / pixels
  // (M/N) * entropy: the lower bound on payload rate for this index distribution.
  double entropy_bound_bpp() const { return sampling_rate * index_entropy; }
  // (M/N) * average code length + overhead.
  double model_bpp() const { return sampling_rate * average_code_length + header_bits_per_pixel; }
};

inline RateReport measure_rate(std::span<const std::uint8_t> stream, std::size_t image_pixels) {
  if (stream.empty()) throw UsageError("empty bitstream");
  if (image_pixels == 0) throw UsageError("image has no pixels");
  const Bitstream bs = read_bitstream(stream);
  const auto px = static_cast<double>(image_pixels);
  const auto samples = static_cast<double>(bs.header.sample_count());
  RateReport r;
  r.bits_per_pixel = 8.0 * static_cast<double>(stream.size()) / px;
  r.payload_bits_per_pixel = static_cast<double>(bs.payload.bit_count) / px;
  r.header_bits_per_pixel =
      8.0 * static_cast<double>(stream.size() - bs.payload.bytes.size()) / px;
  r.sampling_rate = samples / px;
  r.average_code_length = static_cast<double>(bs.payload.bit_count) / samples;
  if (!bs.header.lossless()) {
    const HuffmanTable table(bs.code_lengths);
    const auto indices = decode_indices(bs.payload, table, bs.header.sample_count());
    r.index_entropy = empirical_entropy(indices);
  }
  return r;
}

}  // namespace csgt
