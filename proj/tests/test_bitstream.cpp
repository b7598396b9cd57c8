#include <catch_amalgamated.hpp>

#include <vector>

#include "csgt/bitstream.hpp"

using namespace csgt;

namespace {

Bitstream small_stream() {
  Bitstream bs;
  auto& h = bs.header;
  h.width = 64;
  h.height = 48;
  h.block_size = 16;
  h.measurements = 40;
  h.bit_depth = 2;
  h.matrix_seed = 0x0102030405060708ull;
  h.scramble_seed = 99;
  h.gray_constant = 117.25f;
  h.q_lower = -3.5f;
  h.q_upper = 4.0f;
  const std::vector<std::uint32_t> idx(h.sample_count(), 1);
  std::vector<std::uint32_t> mixed = idx;
  mixed[0] = 0;
  mixed[1] = 3;
  mixed[2] = 2;
  const auto table = build_table(histogram_of(mixed, 4));
  bs.code_lengths.assign(table.lengths().begin(), table.lengths().end());
  bs.payload = encode_indices(mixed, table);
  return bs;
}

}  // namespace

TEST_CASE("write then read reproduces the stream") {
  const Bitstream bs = small_stream();
  const auto bytes = write_bitstream(bs);
  CHECK(bytes.size() == kFixedHeaderBytes + 4 + bs.payload.bytes.size() + kBitCountBytes);
  CHECK(read_bitstream(bytes) == bs);
}

TEST_CASE("header fields are little-endian at fixed offsets") {
  const auto bytes = write_bitstream(small_stream());
  CHECK(bytes[0] == 'C');
  CHECK(bytes[3] == 'T');
  CHECK(bytes[4] == kFormatVersion);
  CHECK(bytes[5] == 64);  // width low byte
  CHECK(bytes[6] == 0);
  CHECK(bytes[9] == 16);  // block size
  CHECK(bytes[10] == 40);  // M low byte
  CHECK(bytes[12] == 2);   // bit depth
  CHECK(bytes[13] == 0x08);  // matrix seed, least significant byte first
  CHECK(bytes[20] == 0x01);
  CHECK(bytes[29] == 1);   // prng id
}

TEST_CASE("malformed streams are data errors") {
  const auto good = write_bitstream(small_stream());

  SECTION("bad magic") {
    auto b = good;
    b[0] = 'X';
    CHECK_THROWS_AS(read_bitstream(b), DataError);
  }
  SECTION("too short") {
    CHECK_THROWS_AS(read_bitstream(std::span(good).first(10)), DataError);
    CHECK_THROWS_AS(read_bitstream(std::vector<std::uint8_t>{}), DataError);
  }
  SECTION("unknown version") {
    auto b = good;
    b[4] = 9;
    CHECK_THROWS_AS(read_bitstream(b), DataError);
  }
  SECTION("M larger than the block") {
    auto b = good;
    b[10] = 0x01;
    b[11] = 0x01;  // 257 > 16*16
    CHECK_THROWS_AS(read_bitstream(b), DataError);
  }
  SECTION("unknown generator") {
    auto b = good;
    b[29] = 2;
    CHECK_THROWS_AS(read_bitstream(b), DataError);
  }
  SECTION("payload shorter than recorded") {
    auto b = good;
    b.erase(b.end() - kBitCountBytes - 1);
    CHECK_THROWS_AS(read_bitstream(b), DataError);
  }
  SECTION("inverted quantizer range") {
    Bitstream bs = small_stream();
    bs.header.q_lower = 5.0f;
    CHECK_THROWS_AS(write_bitstream(bs), DataError);
  }
}

TEST_CASE("lossless streams carry raw float samples") {
  Bitstream bs;
  auto& h = bs.header;
  h.width = 4;
  h.height = 4;
  h.block_size = 2;
  h.measurements = 3;
  h.bit_depth = 0;
  BitWriter w;
  for (std::size_t i = 0; i < h.sample_count(); ++i) w.put(i, 32);
  bs.payload = std::move(w).finish();
  const auto bytes = write_bitstream(bs);
  CHECK(bytes.size() == kFixedHeaderBytes + 4 * 12 + kBitCountBytes);
  CHECK(read_bitstream(bytes) == bs);

  auto cut = bytes;
  cut.erase(cut.begin() + kFixedHeaderBytes, cut.begin() + kFixedHeaderBytes + 4);
  cut[cut.size() - 4] = static_cast<std::uint8_t>(32 * 11);
  cut[cut.size() - 3] = static_cast<std::uint8_t>((32 * 11) >> 8);
  CHECK_THROWS_AS(read_bitstream(cut), DataError);
}

TEST_CASE("32768 bytes over 512x512 pixels is one bit per pixel") {
  // 1-bit codes for 640*409 one-pixel blocks: 261760 bits = 32720 payload bytes,
  // plus 42 header + 2 table + 4 trailer bytes.
  Bitstream bs;
  auto& h = bs.header;
  h.width = 640;
  h.height = 409;
  h.block_size = 1;
  h.measurements = 1;
  h.bit_depth = 1;
  h.q_lower = 0.0f;
  h.q_upper = 1.0f;
  bs.code_lengths = {1, 1};
  std::vector<std::uint32_t> idx(h.sample_count());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i % 2;
  bs.payload = encode_indices(idx, HuffmanTable(bs.code_lengths));
  const auto bytes = write_bitstream(bs);
  REQUIRE(bytes.size() == 32768);

  const auto r = measure_rate(bytes, 512 * 512);
  CHECK(r.bits_per_pixel == 1.0);
  CHECK(r.average_code_length == 1.0);
  CHECK(r.index_entropy == Catch::Approx(1.0));
  CHECK(r.header_bits_per_pixel == Catch::Approx(8.0 * 48 / (512.0 * 512.0)));
  CHECK(r.model_bpp() == Catch::Approx(r.bits_per_pixel).epsilon(1e-12));
  CHECK_THROWS_AS(measure_rate(bytes, 0), UsageError);
}
