#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "csgt/error.hpp"

namespace csgt {

/// Canonical Huffman code described entirely by per-symbol code lengths.
///
/// Length 0 means the symbol has no code. Codes are assigned in order of
/// (length, symbol), so the lengths alone fix every codeword.
class HuffmanTable {
 public:
  HuffmanTable() = default;

  explicit HuffmanTable(std::vector<std::uint8_t> lengths) : lengths_(std::move(lengths)) {
    build_canonical();
  }

  std::span<const std::uint8_t> lengths() const { return lengths_; }
  std::size_t symbol_count() const { return lengths_.size(); }
  std::uint8_t length(std::uint32_t symbol) const { return lengths_.at(symbol); }
  std::uint64_t code(std::uint32_t symbol) const { return codes_.at(symbol); }
  std::uint8_t max_length() const { return max_length_; }

  // Sum of 2^-length over coded symbols.
  double kraft_sum() const {
    double s = 0.0;
    for (auto len : lengths_)
      if (len) s += std::ldexp(1.0, -len);
    return s;
  }

  // Decoding tables (canonical "first code per length" scheme).
  std::span<const std::uint32_t> count_per_length() const { return count_; }
  std::span<const std::uint64_t> first_code() const { return first_code_; }
  std::span<const std::uint32_t> first_index() const { return first_index_; }
  std::span<const std::uint32_t> sorted_symbols() const { return sorted_; }

 private:
  void build_canonical() {
    max_length_ = 0;
    for (auto len : lengths_) max_length_ = std::max(max_length_, len);
    if (max_length_ > 64) throw DataError("Huffman code length exceeds 64 bits");

    sorted_.clear();
    for (std::uint32_t s = 0; s < lengths_.size(); ++s)
      if (lengths_[s]) sorted_.push_back(s);
    std::ranges::stable_sort(sorted_, {}, [&](std::uint32_t s) { return lengths_[s]; });

    count_.assign(max_length_ + 1u, 0);
    for (auto s : sorted_) ++count_[lengths_[s]];

    // Kraft check on integers: every level must leave room for its codes.
    std::uint64_t available = 1;
    for (unsigned len = 1; len <= max_length_; ++len) {
      available = available > (UINT64_MAX >> 1) ? UINT64_MAX : available << 1;
      if (count_[len] > available) throw DataError("Huffman code lengths are over-subscribed");
      available -= count_[len];
    }

    first_code_.assign(max_length_ + 1u, 0);
    first_index_.assign(max_length_ + 1u, 0);
    codes_.assign(lengths_.size(), 0);
    std::uint64_t code = 0;
    std::uint32_t index = 0;
    for (unsigned len = 1; len <= max_length_; ++len) {
      code = (code + count_[len - 1]) << 1;
      first_code_[len] = code;
      first_index_[len] = index;
      for (std::uint32_t i = 0; i < count_[len]; ++i) codes_[sorted_[index + i]] = code + i;
      index += count_[len];
    }
  }

  std::vector<std::uint8_t> lengths_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint64_t> first_code_;
  std::vector<std::uint32_t> first_index_;
  std::vector<std::uint32_t> sorted_;
  std::uint8_t max_length_ = 0;
};

// Optimal prefix-code lengths for a histogram. Merges the two lightest
// subtrees, breaking weight ties by the smaller minimum symbol. A lone
// symbol gets length 1.
inline HuffmanTable build_table(std::span<const std::uint64_t> histogram) {
  struct Node {
    std::uint64_t weight;
    std::uint32_t min_symbol;
    int left = -1, right = -1;
  };
  std::vector<Node> nodes;
  for (std::uint32_t s = 0; s < histogram.size(); ++s)
    if (histogram[s]) nodes.push_back({histogram[s], s});
  if (nodes.empty()) throw UsageError("cannot build a Huffman table from an all-zero histogram");

  std::vector<std::uint8_t> lengths(histogram.size(), 0);
  if (nodes.size() == 1) {
    lengths[nodes[0].min_symbol] = 1;
    return HuffmanTable(std::move(lengths));
  }

  auto heavier = [&](int a, int b) {
    if (nodes[a].weight != nodes[b].weight) return nodes[a].weight > nodes[b].weight;
    return nodes[a].min_symbol > nodes[b].min_symbol;
  };
  std::priority_queue<int, std::vector<int>, decltype(heavier)> heap(heavier);
  const int leaves = static_cast<int>(nodes.size());
  for (int i = 0; i < leaves; ++i) heap.push(i);
  while (heap.size() > 1) {
    const int a = heap.top();
    heap.pop();
    const int b = heap.top();
    heap.pop();
    nodes.push_back({nodes[a].weight + nodes[b].weight,
                     std::min(nodes[a].min_symbol, nodes[b].min_symbol), a, b});
    heap.push(static_cast<int>(nodes.size()) - 1);
  }

  // Depth-first walk from the root assigns depths to leaves.
  std::vector<std::pair<int, unsigned>> stack{{heap.top(), 0u}};
  while (!stack.empty()) {
    auto [n, depth] = stack.back();
    stack.pop_back();
    if (n < leaves) {
      if (depth > 64) throw DataError("Huffman code length exceeds 64 bits");
      lengths[nodes[n].min_symbol] = static_cast<std::uint8_t>(depth);
    } else {
      stack.push_back({nodes[n].left, depth + 1});
      stack.push_back({nodes[n].right, depth + 1});
    }
  }
  return HuffmanTable(std::move(lengths));
}

inline std::vector<std::uint64_t> histogram_of(std::span<const std::uint32_t> symbols,
                                               std::size_t alphabet) {
  std::vector<std::uint64_t> h(alphabet, 0);
  for (auto s : symbols) {
    if (s >= alphabet) throw UsageError("symbol outside alphabet");
    ++h[s];
  }
  return h;
}

// ---------------------------------------------------------------------------

/// Bits packed most-significant-bit first; the tail of the last byte is zero.
struct PackedBits {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_count = 0;
};

class BitWriter {
 public:
  void put(std::uint64_t value, unsigned nbits) {
    for (unsigned i = nbits; i-- > 0;) put_bit((value >> i) & 1u);
  }

  void put_bit(unsigned bit) {
    if (out_.bit_count % 8 == 0) out_.bytes.push_back(0);
    if (bit) out_.bytes.back() |= static_cast<std::uint8_t>(0x80u >> (out_.bit_count % 8));
    ++out_.bit_count;
  }

  PackedBits finish() && { return std::move(out_); }

 private:
  PackedBits out_;
};

class BitReader {
 public:
  explicit BitReader(const PackedBits& bits) : bits_(bits) {}

  bool exhausted() const { return pos_ >= bits_.bit_count; }
  std::uint64_t position() const { return pos_; }

  unsigned get_bit() {
    if (exhausted()) throw DataError("payload exhausted before all symbols were decoded");
    const unsigned bit = (bits_.bytes[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
    ++pos_;
    return bit;
  }

 private:
  const PackedBits& bits_;
  std::uint64_t pos_ = 0;
};

inline PackedBits encode_indices(std::span<const std::uint32_t> indices, const HuffmanTable& table) {
  BitWriter w;
  for (auto s : indices) {
    if (s >= table.symbol_count() || table.length(s) == 0)
      throw UsageError("symbol has no Huffman code");
    w.put(table.code(s), table.length(s));
  }
  return std::move(w).finish();
}

inline std::vector<std::uint32_t> decode_indices(const PackedBits& bits, const HuffmanTable& table,
                                                 std::size_t count) {
  if (bits.bytes.size() != (bits.bit_count + 7) / 8)
    throw DataError("payload byte length does not match its bit count");
  if (bits.bit_count % 8 != 0) {
    const unsigned pad = 8 - static_cast<unsigned>(bits.bit_count % 8);
    if (bits.bytes.back() & ((1u << pad) - 1u)) throw DataError("nonzero padding bits in payload");
  }
  const auto cnt = table.count_per_length();
  const auto first = table.first_code();
  const auto first_idx = table.first_index();
  const auto sorted = table.sorted_symbols();

  std::vector<std::uint32_t> out;
  out.reserve(count);
  BitReader r(bits);
  while (out.size() < count) {
    std::uint64_t code = 0;
    unsigned len = 0;
    for (;;) {
      code = (code << 1) | r.get_bit();
      ++len;
      if (len > table.max_length()) throw DataError("invalid Huffman codeword in payload");
      if (code - first[len] < cnt[len] && code >= first[len]) {
        out.push_back(sorted[first_idx[len] + (code - first[len])]);
        break;
      }
    }
  }
  if (!r.exhausted()) throw DataError("trailing bits after the last expected symbol");
  return out;
}

}  // namespace csgt
