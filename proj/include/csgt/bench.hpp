#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "csgt/codec.hpp"
#include "csgt/error.hpp"
#include "csgt/image.hpp"
#include "csgt/metrics.hpp"

namespace csgt {

struct CorpusImage {
  std::string name;  // file stem
  Image image;
};

// Every *.pgm in `dir`, ordered by file name.
inline std::vector<CorpusImage> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("corpus is not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
  if (files.empty()) throw DataError("corpus contains no .pgm images: " + dir.string());
  std::ranges::sort(files);
  std::vector<CorpusImage> out;
  for (const auto& f : files) out.push_back({f.stem().string(), pgm::read_file(f.string())});
  return out;
}

/// One (image, scheme, SR, bit depth) measurement.
struct BenchRow {
  std::string experiment;
  std::string image;
  Scheme scheme = Scheme::kSbcsGt;
  double sampling_rate = 0.0;  // M / block_length actually used
  int bit_depth = kLossless;
  std::optional<double> target_bpp;
  double bpp = 0.0;
  double psnr = 0.0;
  double variance = 0.0;  // sample variance of y' over all blocks
  std::optional<double> entropy;  // bits/index; absent for lossless
  std::uint64_t seed = 0;
  int iterations = 0;
};

struct BenchConfig {
  std::uint64_t seed = 2021;
  std::size_t block_size = 32;
  DecoderConfig decoder;
  unsigned jobs = 1;
  std::vector<double> sampling_rates{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<int> bit_depths{kLossless, 8, 7, 6};
  std::vector<double> target_bpps{0.2, 0.4, 0.6, 0.8, 1.0};
  int rd_bit_depth = 6;
  double histogram_sampling_rate = 0.5;
  std::size_t histogram_bins = kDefaultHistogramBins;

  EncoderConfig encoder(Scheme scheme, double sr, int bits) const {
    EncoderConfig e;
    e.sampling_rate = sr;
    e.bit_depth = bits;
    e.block_size = block_size;
    e.matrix_seed = seed;
    e.scramble_seed = seed + 1;
    e.scheme = scheme;
    return e;
  }
};

inline constexpr Scheme kSchemes[] = {Scheme::kSbcs, Scheme::kSbcsGt};

// Encodes, writes, parses and decodes; every number comes from the real stream.
inline BenchRow run_cell(const CorpusImage& img, const EncoderConfig& enc_cfg,
                         const DecoderConfig& dec_cfg, std::uint64_t seed) {
  const EncodedImage enc = encode(img.image, enc_cfg);
  const DecodedImage dec = decode(std::span<const std::uint8_t>(enc.bytes), dec_cfg);
  BenchRow row;
  row.image = img.name;
  row.scheme = enc_cfg.scheme;
  row.sampling_rate = static_cast<double>(enc.stream.header.measurements) /
                      static_cast<double>(enc_cfg.block_size * enc_cfg.block_size);
  row.bit_depth = enc_cfg.bit_depth;
  row.bpp = 8.0 * static_cast<double>(enc.bytes.size()) / static_cast<double>(img.image.size());
  row.psnr = psnr(img.image, dec.result.image);
  row.variance = sample_variance(std::span<const double>(enc.transformed.data(),
                                                         static_cast<std::size_t>(enc.transformed.size())));
  if (!enc.indices.empty()) row.entropy = empirical_entropy(enc.indices);
  row.seed = seed;
  row.iterations = dec.result.iterations;
  return row;
}

namespace detail {

// Runs tasks on `jobs` threads; results keep task order.
inline std::vector<BenchRow> run_tasks(const std::vector<std::function<BenchRow()>>& tasks, unsigned jobs) {
  std::vector<BenchRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) rows[i] = tasks[i]();
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  if (n == 1) {
    worker();
    return rows;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  pool.clear();
  return rows;
}

}  // namespace detail

/// Bit-depth sweep: SR x {lossless, 8, 7, 6} x {SBCS, SBCS-GT} per image.
inline std::vector<BenchRow> bitdepth_experiment(const std::vector<CorpusImage>& corpus,
                                                 const BenchConfig& cfg) {
  std::vector<std::function<BenchRow()>> tasks;
  for (const auto& img : corpus)
    for (Scheme scheme : kSchemes)
      for (int bits : cfg.bit_depths)
        for (double sr : cfg.sampling_rates)
          tasks.emplace_back([&, scheme, bits, sr] {
            BenchRow r = run_cell(img, cfg.encoder(scheme, sr, bits), cfg.decoder, cfg.seed);
            r.experiment = "bitdepth";
            return r;
          });
  return detail::run_tasks(tasks, cfg.jobs);
}

/// Picks M so the stream's bpp is closest to `target`; bpp is monotone in M up to
/// entropy-coding noise, so a bisection for the first M reaching the target and
/// a comparison with its predecessor suffice.
inline std::size_t match_measurements(const Image& img, EncoderConfig enc_cfg, double target_bpp) {
  const std::size_t n = enc_cfg.block_size * enc_cfg.block_size;
  auto bpp_at = [&](std::size_t m) {
    enc_cfg.measurements = m;
    return 8.0 * static_cast<double>(encode(img, enc_cfg).bytes.size()) / static_cast<double>(img.size());
  };
  std::size_t lo = 1, hi = n;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (bpp_at(mid) >= target_bpp)
      hi = mid;
    else
      lo = mid + 1;
  }
  if (lo > 1 && std::abs(bpp_at(lo - 1) - target_bpp) < std::abs(bpp_at(lo) - target_bpp)) --lo;
  return lo;
}

/// Rate-distortion: PSNR at matched bpp with a fixed bit depth, SR chosen per target.
inline std::vector<BenchRow> rd_experiment(const std::vector<CorpusImage>& corpus, const BenchConfig& cfg) {
  std::vector<std::function<BenchRow()>> tasks;
  for (const auto& img : corpus)
    for (Scheme scheme : kSchemes)
      for (double target : cfg.target_bpps)
        tasks.emplace_back([&, scheme, target] {
          EncoderConfig e = cfg.encoder(scheme, 0.5, cfg.rd_bit_depth);
          e.measurements = match_measurements(img.image, e, target);
          BenchRow r = run_cell(img, e, cfg.decoder, cfg.seed);
          r.experiment = "rd";
          r.target_bpp = target;
          return r;
        });
  return detail::run_tasks(tasks, cfg.jobs);
}

struct HistogramRow {
  std::string image;
  Scheme scheme;
  double sampling_rate;
  std::uint64_t seed;
  double variance;
  Histogram histogram;
};

/// Distribution of the (unquantized) CS samples per image and scheme.
inline std::vector<HistogramRow> histogram_experiment(const std::vector<CorpusImage>& corpus,
                                                      const BenchConfig& cfg) {
  std::vector<HistogramRow> out;
  for (const auto& img : corpus)
    for (Scheme scheme : kSchemes) {
      const EncodedImage enc =
          encode(img.image, cfg.encoder(scheme, cfg.histogram_sampling_rate, kLossless));
      const std::span<const double> y(enc.transformed.data(),
                                      static_cast<std::size_t>(enc.transformed.size()));
      out.push_back({img.name, scheme, cfg.histogram_sampling_rate, cfg.seed, sample_variance(y),
                     measurement_histogram(y, cfg.histogram_bins)});
    }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string fmt(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace detail

inline constexpr const char* kBenchCsvHeader =
    "experiment,image,scheme,sr,bit_depth,target_bpp,bpp,psnr,variance,entropy,seed";

inline void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.image << ',' << scheme_name(r.scheme) << ','
        << detail::fmt(r.sampling_rate, 4) << ','
        << (r.bit_depth == kLossless ? std::string("lossless") : std::to_string(r.bit_depth)) << ','
        << (r.target_bpp ? detail::fmt(*r.target_bpp, 2) : "") << ',' << detail::fmt(r.bpp, 4) << ','
        << detail::fmt(r.psnr, 4) << ',' << detail::fmt(r.variance, 4) << ','
        << (r.entropy ? detail::fmt(*r.entropy, 4) : "") << ',' << r.seed << '\n';
  }
}

inline void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows) {
  out << "image,scheme,sr,seed,variance,bin,lower,upper,count\n";
  for (const auto& r : rows) {
    const auto& h = r.histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      const double upper = b + 1 == h.counts.size() ? h.upper : h.bin_lower(b + 1);
      out << r.image << ',' << scheme_name(r.scheme) << ',' << detail::fmt(r.sampling_rate, 4) << ','
          << r.seed << ',' << detail::fmt(r.variance, 4) << ',' << b << ','
          << detail::fmt(h.bin_lower(b), 4) << ',' << detail::fmt(upper, 4) << ',' << h.counts[b]
          << '\n';
    }
  }
}

}  // namespace csgt
