// csgt: command-line front end for the compressed-sensing gray-transform codec.
//
// Exit codes: 0 ok, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "csgt/csgt.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct SolverFlags {
  int iterations = 200;
  double tol = 1e-4;
  std::string basis = "wavelet";
  std::string wavelet = "db2";
  std::size_t levels = 4;
  double tau = 0.5;
  std::string schedule = "universal";
  double decay = 0.97;
  std::string projection = "exact";
  std::size_t window = 3;

  void add_to(CLI::App* app) {
    app->add_option("--iterations", iterations, "Maximum SPL iterations")->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "Relative-change stopping tolerance")->check(CLI::PositiveNumber);
    app->add_option("--basis", basis, "Sparsity basis")->check(CLI::IsMember({"wavelet", "dct"}));
    app->add_option("--wavelet", wavelet, "Wavelet filter")->check(CLI::IsMember({"haar", "db2", "db4"}));
    app->add_option("--levels", levels, "Wavelet decomposition levels");
    app->add_option("--tau", tau, "Threshold scale")->check(CLI::NonNegativeNumber);
    app->add_option("--schedule", schedule, "Threshold schedule")
        ->check(CLI::IsMember({"universal", "decaying"}));
    app->add_option("--decay", decay, "Per-iteration decay for the decaying schedule");
    app->add_option("--projection", projection, "Projection step")
        ->check(CLI::IsMember({"exact", "landweber"}));
    app->add_option("--window", window, "Wiener smoothing window (odd; 1 disables)");
  }

  csgt::DecoderConfig config() const {
    csgt::DecoderConfig d;
    d.solver.max_iterations = iterations;
    d.solver.convergence_tol = tol;
    d.solver.threshold.scale = tau;
    d.solver.threshold.decay = decay;
    d.solver.threshold.kind = schedule == "decaying" ? csgt::ThresholdSchedule::Kind::kDecaying
                                                     : csgt::ThresholdSchedule::Kind::kUniversal;
    d.solver.projection =
        projection == "landweber" ? csgt::ProjectionMode::kLandweber : csgt::ProjectionMode::kExact;
    d.solver.smoothing_window = window;
    d.basis = basis == "dct" ? csgt::BasisKind::kDct : csgt::BasisKind::kWavelet;
    d.wavelet = wavelet;
    d.wavelet_levels = levels;
    d.solver.validate();
    return d;
  }
};

const auto kSamplingRate = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      std::istringstream in(s);
      if (!(in >> v) || !(v > 0.0 && v <= 1.0)) return "sampling rate must be in (0, 1]";
      return {};
    },
    "(0,1]");

std::string fmt_psnr(double p) {
  if (std::isinf(p)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed-sensing image codec with gray-transformation preprocessing"};
  app.require_subcommand(1);

  // encode
  auto* enc = app.add_subcommand("encode", "Encode a PGM image into a .csgt bitstream");
  std::string enc_in, enc_out;
  double sr = 0.5;
  int bits = 6;
  bool lossless = false;
  std::size_t block = 32;
  std::uint64_t seed = 2021;
  std::string gt = "on";
  enc->add_option("input", enc_in, "Input PGM (P5, 8-bit)")->required();
  enc->add_option("-o,--output", enc_out, "Output .csgt file")->required();
  enc->add_option("--sr", sr, "Sampling rate M/N")->check(kSamplingRate);
  auto* bits_opt = enc->add_option("--bits", bits, "Bits per CS sample")->check(CLI::Range(1, 16));
  enc->add_flag("--lossless", lossless, "Store CS samples as raw float32")->excludes(bits_opt);
  enc->add_option("--block", block, "Block size")->check(CLI::Range(1, 255));
  enc->add_option("--seed", seed, "Matrix seed (scramble seed is seed+1)");
  enc->add_option("--gt", gt, "Gray transformation")->check(CLI::IsMember({"on", "off"}));

  // decode
  auto* dec = app.add_subcommand("decode", "Reconstruct a PGM image from a .csgt bitstream");
  std::string dec_in, dec_out, dec_ref;
  SolverFlags dec_solver;
  dec->add_option("input", dec_in, "Input .csgt file")->required();
  dec->add_option("-o,--output", dec_out, "Output PGM")->required();
  dec->add_option("--ref", dec_ref, "Reference PGM for PSNR");
  dec_solver.add_to(dec);

  // bench
  auto* bench = app.add_subcommand("bench", "Run an experiment over a PGM corpus");
  std::string corpus_dir, experiment = "bitdepth", bench_out;
  unsigned jobs = 1;
  std::uint64_t bench_seed = 2021;
  SolverFlags bench_solver;
  bench->add_option("corpus", corpus_dir, "Directory of PGM images")->required();
  bench->add_option("--experiment", experiment, "Experiment")
      ->check(CLI::IsMember({"histogram", "bitdepth", "rd"}));
  bench->add_option("-o,--output", bench_out, "Output CSV")->required();
  bench->add_option("--seed", bench_seed, "Experiment seed");
  bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_solver.add_to(bench);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Report CS-sample statistics for both schemes");
  std::string an_in;
  double an_sr = 0.5;
  int an_bits = 6;
  std::uint64_t an_seed = 2021;
  std::size_t an_block = 32;
  analyze->add_option("input", an_in, "Input PGM")->required();
  analyze->add_option("--sr", an_sr, "Sampling rate M/N")->check(kSamplingRate);
  analyze->add_option("--bits", an_bits, "Bits per CS sample")->check(CLI::Range(1, 16));
  analyze->add_option("--seed", an_seed, "Matrix seed");
  analyze->add_option("--block", an_block, "Block size")->check(CLI::Range(1, 255));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*enc) {
      const csgt::Image img = csgt::pgm::read_file(enc_in);
      csgt::EncoderConfig cfg;
      cfg.sampling_rate = sr;
      cfg.bit_depth = lossless ? csgt::kLossless : bits;
      cfg.block_size = block;
      cfg.matrix_seed = seed;
      cfg.scramble_seed = seed + 1;
      cfg.scheme = gt == "on" ? csgt::Scheme::kSbcsGt : csgt::Scheme::kSbcs;
      const csgt::EncodedImage e = csgt::encode(img, cfg);
      csgt::write_file_bytes(enc_out, e.bytes);
      const csgt::RateReport rate = csgt::measure_rate(e.bytes, img.size());
      std::printf("scheme %s\nmeasurements_per_block %u\ngray_constant %.6f\nbytes %zu\nbpp %.4f\n",
                  csgt::scheme_name(cfg.scheme), static_cast<unsigned>(e.stream.header.measurements),
                  e.gray_constant.value, e.bytes.size(), rate.bits_per_pixel);
      if (!lossless) std::printf("index_entropy %.4f\n", rate.index_entropy);
    } else if (*dec) {
      const auto bytes = csgt::read_file_bytes(dec_in);
      const csgt::DecodedImage d = csgt::decode(std::span<const std::uint8_t>(bytes), dec_solver.config());
      csgt::pgm::write_file(dec_out, d.result.image);
      std::printf("iterations %d\nconverged %s\n", d.result.iterations, d.result.converged ? "yes" : "no");
      if (!d.result.converged) std::fprintf(stderr, "warning: SPL hit the iteration limit\n");
      if (!dec_ref.empty()) {
        const csgt::Image ref = csgt::pgm::read_file(dec_ref);
        std::printf("psnr %s\n", fmt_psnr(csgt::psnr(ref, d.result.image)).c_str());
      }
    } else if (*bench) {
      csgt::BenchConfig cfg;
      cfg.seed = bench_seed;
      cfg.jobs = jobs;
      cfg.decoder = bench_solver.config();
      const auto corpus = csgt::load_corpus(corpus_dir);
      std::ofstream out(bench_out);
      if (!out) throw csgt::DataError("cannot write " + bench_out);
      if (experiment == "histogram")
        csgt::write_histogram_csv(out, csgt::histogram_experiment(corpus, cfg));
      else if (experiment == "rd")
        csgt::write_csv(out, csgt::rd_experiment(corpus, cfg));
      else
        csgt::write_csv(out, csgt::bitdepth_experiment(corpus, cfg));
      if (!out) throw csgt::DataError("write failed for " + bench_out);
    } else if (*analyze) {
      const csgt::Image img = csgt::pgm::read_file(an_in);
      std::printf("scheme,gray_constant,predicted_variance,variance,mean,entropy,bpp\n");
      for (csgt::Scheme scheme : csgt::kSchemes) {
        csgt::EncoderConfig cfg;
        cfg.sampling_rate = an_sr;
        cfg.bit_depth = an_bits;
        cfg.block_size = an_block;
        cfg.matrix_seed = an_seed;
        cfg.scramble_seed = an_seed + 1;
        cfg.scheme = scheme;
        const csgt::EncodedImage e = csgt::encode(img, cfg);
        const std::span<const double> y(e.transformed.data(), static_cast<std::size_t>(e.transformed.size()));
        const auto mom = csgt::moments(y);
        // Expected variance of y' averaged over blocks: (N/M) * mean (x - a)^2.
        const double n = static_cast<double>(an_block * an_block);
        const double predicted = csgt::predicted_variance(img, e.gray_constant, 1) /
                                 static_cast<double>(img.size()) * n /
                                 static_cast<double>(e.stream.header.measurements);
        std::printf("%s,%.6f,%.4f,%.4f,%.4f,%.4f,%.4f\n", csgt::scheme_name(scheme), e.gray_constant.value,
                    predicted, mom.variance, mom.mean, csgt::empirical_entropy(e.indices),
                    8.0 * static_cast<double>(e.bytes.size()) / static_cast<double>(img.size()));
      }
    }
  } catch (const csgt::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const csgt::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitOk;
}
