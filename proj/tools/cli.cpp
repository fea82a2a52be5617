#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "asaedct/checkpoint.hpp"
#include "asaedct/error.hpp"
#include "asaedct/pipeline.hpp"

namespace asaedct::cli {
namespace {

struct CliError {
  int code;
  std::string message;
};

struct Options {
  std::string input, output, model, history, reconstruction, stream, pairs, test;
  std::string format = "ascii";
  std::string path_order = "alg1";
  std::string threshold = "hard";
  std::size_t synthetic = 0;
  std::size_t test_blocks = 100;
  int blocks = 64;
  int channels = 3;
  int theta = 4;
  int phi = 5;
  double xi = 0.6;
  std::optional<double> alpha;
  double lambda = 10.0;
  double lr = 1e-3;
  std::size_t batch = 16;
  int epochs = 200;
  std::uint64_t seed = 0;
  std::uint32_t bit_depth = 64;
  double sample_rate = 100.0;
  int repeats = 1;
};

InputFormat input_format(const Options& o) {
  return o.format == "csv" ? InputFormat::kCsvColumn : InputFormat::kAsciiLines;
}

Recording load_input(const std::string& path, const Options& o) {
  return load_recording(path, input_format(o), o.bit_depth, o.sample_rate);
}

// Training data: a file if given, otherwise the synthetic corpus.
Recording training_recording(const Options& o) {
  if (!o.input.empty()) return load_input(o.input, o);
  const std::size_t count = o.synthetic > 0 ? o.synthetic : 1000;
  SyntheticOptions so;
  so.block_size = o.blocks;
  so.sample_rate = o.sample_rate;
  return synthetic_recording(o.seed, count, so);
}

ModelConfig model_config(const Options& o) {
  ModelConfig m;
  m.block_size = o.blocks;
  m.channels = o.channels;
  m.threshold = o.threshold == "soft" ? ThresholdKind::kSoft : ThresholdKind::kHard;
  m.path_order = o.path_order == "swapped" ? PathOrder::kScaleFirst
                                           : PathOrder::kThresholdFirst;
  return m;
}

TrainConfig train_config(const Options& o) {
  TrainConfig t;
  t.alpha = o.alpha.value_or(1.0 / static_cast<double>(o.blocks));
  t.lambda = o.lambda;
  t.lr = o.lr;
  t.batch_size = o.batch;
  t.xi = o.xi;
  t.max_epochs = o.epochs;
  t.seed = o.seed;
  t.theta = o.theta;
  t.phi = o.phi;
  return t;
}

CompressOptions compress_options(const Options& o) {
  CompressOptions c;
  c.theta = o.theta;
  c.phi = o.phi;
  return c;
}

ModelParams load_model(const std::string& path) {
  try {
    return load_checkpoint(path);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw CliError{kModelError, std::string("model: ") + e.what()};
  }
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
}

std::ofstream open_text(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot create '" + path + "'");
  f << std::setprecision(17);
  return f;
}

constexpr const char* kMetricsHeader = "cr,prd,qs,zero_fraction,bytes,samples,bit_depth";

void write_metrics_row(std::ostream& os, const Metrics& m, double zero_fraction,
                       std::size_t bytes, std::size_t samples, std::uint32_t bit_depth) {
  os << format_metric(m.cr, 6) << ',' << format_metric(m.prd, 6) << ','
     << format_metric(m.qs, 6) << ',' << format_metric(zero_fraction, 6) << ','
     << bytes << ',' << samples << ',' << bit_depth << '\n';
}

void emit_metrics(const Options& o, std::ostream& out, const Metrics& m,
                  double zero_fraction, std::size_t bytes, std::size_t samples,
                  std::uint32_t bit_depth) {
  out << "CR " << format_metric(m.cr) << "  PRD " << format_metric(m.prd)
      << "%  QS " << format_metric(m.qs) << '\n';
  if (!o.output.empty()) {
    auto f = open_text(o.output);
    f << kMetricsHeader << '\n';
    write_metrics_row(f, m, zero_fraction, bytes, samples, bit_depth);
  }
}

void write_pairs(const std::string& path, std::span<const double> original,
                 std::span<const double> reconstructed) {
  auto f = open_text(path);
  f << "index,original,reconstructed\n";
  for (std::size_t i = 0; i < original.size(); ++i) {
    f << i << ',' << original[i] << ',' << reconstructed[i] << '\n';
  }
}

int cmd_train(const Options& o, std::ostream& out) {
  const Recording rec = training_recording(o);
  const TrainResult r = train_on_recording(rec, model_config(o), train_config(o));
  save_checkpoint(o.output, r.params);
  const std::string history = o.history.empty() ? o.output + ".history.csv" : o.history;
  r.history.write_csv(history);
  const double zf = r.history.epochs.empty()
                        ? 0.0
                        : r.history.epochs[static_cast<std::size_t>(
                              std::max(r.best_epoch, 0))].zero_fraction;
  out << "trained " << r.history.epochs.size() << " epochs on "
      << rec.samples.size() / static_cast<std::size_t>(o.blocks) << " blocks; loss "
      << format_metric(r.initial_loss, 6) << " -> " << format_metric(r.final_loss, 6)
      << "; best epoch " << r.best_epoch << " (zero fraction " << format_metric(zf, 3)
      << ")" << (r.stopped_by_rule ? "; stopped by xi rule" : "") << '\n'
      << "checkpoint " << o.output << ", history " << history << '\n';
  return kOk;
}

int cmd_compress(const Options& o, std::ostream& out) {
  const ModelParams model = load_model(o.model);
  const Recording rec = load_input(o.input, o);
  const CompressResult c = compress_recording(rec, model, compress_options(o));
  write_bytes(o.output, c.stream);
  const double per_640 =
      c.encode_seconds * 640.0 / static_cast<double>(rec.samples.size());
  out << "wrote " << c.stream.size() << " bytes for " << rec.samples.size()
      << " samples; latent zero fraction " << format_metric(c.zero_fraction, 3) << '\n'
      << "encode time " << std::setprecision(3) << std::scientific << c.encode_seconds
      << " s total, " << per_640 << " s per 640 samples (6.4 s at 100 Hz)\n"
      << std::defaultfloat;
  return kOk;
}

int cmd_decompress(const Options& o, std::ostream& out) {
  const ModelParams model = load_model(o.model);
  const auto bytes = read_bytes(o.input);
  const DecompressResult d = decompress_recording(bytes, model);
  write_ascii(o.output, d.samples);
  out << "wrote " << d.samples.size() << " samples to " << o.output << '\n';
  return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const Recording original = load_input(o.input, o);
  const Recording recon = load_input(o.reconstruction, o);
  if (original.samples.size() != recon.samples.size()) {
    throw CliError{kBadValue, "original has " + std::to_string(original.samples.size()) +
                                  " samples, reconstruction " +
                                  std::to_string(recon.samples.size())};
  }
  const auto bytes = read_bytes(o.stream);
  const DecodedStream s = decompress_stream(bytes);
  const Metrics m = evaluate_metrics(original.samples, recon.samples,
                                     s.header.source_bit_depth, bytes.size());
  std::size_t zeros = 0, total = 0;
  for (const auto& b : s.blocks) {
    zeros += static_cast<std::size_t>(std::count(b.begin(), b.end(), 0));
    total += b.size();
  }
  const double zf = total ? static_cast<double>(zeros) / static_cast<double>(total) : 0.0;
  emit_metrics(o, out, m, zf, bytes.size(), original.samples.size(),
               s.header.source_bit_depth);
  if (!o.pairs.empty()) write_pairs(o.pairs, original.samples, recon.samples);
  return kOk;
}

int cmd_roundtrip(const Options& o, std::ostream& out) {
  const ModelParams model = load_model(o.model);
  const Recording rec = load_input(o.input, o);
  const RoundTripResult r = roundtrip(rec, model, compress_options(o));
  if (!o.stream.empty()) write_bytes(o.stream, r.compressed.stream);
  if (!o.reconstruction.empty()) write_ascii(o.reconstruction, r.decompressed.samples);
  if (!o.pairs.empty()) write_pairs(o.pairs, rec.samples, r.decompressed.samples);
  out << "samples " << rec.samples.size() << " -> " << r.decompressed.samples.size()
      << ", " << r.compressed.stream.size() << " bytes\n";
  emit_metrics(o, out, r.metrics, r.compressed.zero_fraction, r.compressed.stream.size(),
               rec.samples.size(), rec.source_bit_depth);
  return kOk;
}

int cmd_ablate(const Options& o, std::ostream& out) {
  const Recording train_rec = training_recording(o);
  Recording test_rec;
  if (!o.test.empty()) {
    test_rec = load_input(o.test, o);
  } else {
    SyntheticOptions so;
    so.block_size = o.blocks;
    so.sample_rate = o.sample_rate;
    test_rec = synthetic_recording(o.seed + 1, o.test_blocks, so);
  }
  std::ofstream csv;
  if (!o.output.empty()) {
    csv = open_text(o.output);
    csv << "configuration,cr,prd,qs,zero_fraction,epochs\n";
  }
  out << std::left << std::setw(22) << "configuration" << std::right << std::setw(10)
      << "CR" << std::setw(10) << "PRD" << std::setw(10) << "QS" << '\n';
  const auto variants = ablation_variants(model_config(o), train_config(o));
  for (const AblationVariant& base : variants) {
    Metrics mean;
    double zf = 0.0, epochs = 0.0;
    for (int rep = 0; rep < o.repeats; ++rep) {
      AblationVariant v = base;
      v.train.seed = o.seed + static_cast<std::uint64_t>(rep);
      const AblationResult r = run_ablation_variant(v, train_rec, test_rec, compress_options(o));
      mean.cr += r.metrics.cr;
      mean.prd += r.metrics.prd;
      mean.qs += r.metrics.qs;
      zf += r.zero_fraction;
      epochs += r.epochs;
    }
    const double n = o.repeats;
    mean.cr /= n;
    mean.prd /= n;
    mean.qs /= n;
    out << std::left << std::setw(22) << base.name << std::right << std::fixed
        << std::setprecision(2) << std::setw(10) << mean.cr << std::setw(10) << mean.prd
        << std::setw(10) << mean.qs << std::defaultfloat << '\n';
    if (csv.is_open()) {
      csv << base.name << ',' << format_metric(mean.cr, 6) << ',' << format_metric(mean.prd, 6)
          << ',' << format_metric(mean.qs, 6) << ',' << format_metric(zf / n, 6) << ','
          << epochs / n << '\n';
    }
  }
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kIoError;
    case ErrorKind::kParse:
      return kParseError;
    case ErrorKind::kBadMagic:
    case ErrorKind::kUnsupportedVersion:
    case ErrorKind::kChecksumMismatch:
    case ErrorKind::kMalformedStream:
    case ErrorKind::kCompressor:
      return kStreamError;
    case ErrorKind::kShapeMismatch:
      return kModelError;
    case ErrorKind::kDivergence:
      return kDiverged;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kNonFinite:
    case ErrorKind::kOverflow:
      return kBadValue;
  }
  return kFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse DCT autoencoder compression for 1-D signals", "asaedct"};
  app.require_subcommand(1);
  Options o;

  const auto add_format = [&o](CLI::App* c) {
    c->add_option("--format", o.format, "Signal file format")
        ->check(CLI::IsMember({"ascii", "csv"}));
    c->add_option("--bit-depth", o.bit_depth, "Bits per original sample, for CR");
    c->add_option("--sample-rate", o.sample_rate, "Sample rate in Hz");
  };
  const auto add_quant = [&o](CLI::App* c) {
    c->add_option("--theta", o.theta, "Quantizer decimal exponent");
    c->add_option("--phi", o.phi, "Quantizer divisor");
  };
  const auto add_training = [&](CLI::App* c) {
    c->add_option("--synthetic", o.synthetic, "Synthetic training blocks (default 1000)");
    c->add_option("--blocks", o.blocks, "Block length N")->check(CLI::Range(2, 4096));
    c->add_option("--channels", o.channels, "Parallel DCT paths C")->check(CLI::Range(1, 64));
    c->add_option("--xi", o.xi, "Latent zero fraction that ends training");
    c->add_option("--alpha", o.alpha, "Sparsity target (default 1/N)");
    c->add_option("--lambda", o.lambda, "Penalty weight");
    c->add_option("--lr", o.lr, "Learning rate");
    c->add_option("--batch", o.batch, "Batch size");
    c->add_option("--epochs", o.epochs, "Maximum epochs");
    c->add_option("--seed", o.seed, "Seed for data, initialization and shuffling");
    c->add_option("--path-order", o.path_order, "threshold->scale (alg1) or swapped")
        ->check(CLI::IsMember({"alg1", "swapped"}));
    c->add_option("--threshold", o.threshold, "Threshold nonlinearity")
        ->check(CLI::IsMember({"hard", "soft"}));
    add_quant(c);
    add_format(c);
  };

  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  train->add_option("--input", o.input, "Training recording (omit for synthetic data)");
  train->add_option("--output", o.output, "Checkpoint path")->required();
  train->add_option("--history", o.history, "History CSV (default <output>.history.csv)");
  add_training(train);

  auto* compress = app.add_subcommand("compress", "Compress a recording");
  compress->add_option("--input", o.input, "Recording")->required();
  compress->add_option("--model", o.model, "Checkpoint")->required();
  compress->add_option("--output", o.output, "Stream path")->required();
  add_quant(compress);
  add_format(compress);

  auto* decompress = app.add_subcommand("decompress", "Reconstruct a recording");
  decompress->add_option("--input", o.input, "Stream")->required();
  decompress->add_option("--model", o.model, "Checkpoint")->required();
  decompress->add_option("--output", o.output, "Reconstruction, one value per line")->required();

  auto* evaluate = app.add_subcommand("evaluate", "CR, PRD and QS of a reconstruction");
  evaluate->add_option("--input", o.input, "Original recording")->required();
  evaluate->add_option("--reconstruction", o.reconstruction, "Reconstructed recording")->required();
  evaluate->add_option("--stream", o.stream, "Compressed stream, for CR")->required();
  evaluate->add_option("--output", o.output, "Metrics CSV");
  evaluate->add_option("--pairs", o.pairs, "Original/reconstructed CSV");
  add_format(evaluate);

  auto* round = app.add_subcommand("roundtrip", "Compress, decompress and evaluate");
  round->add_option("--input", o.input, "Recording")->required();
  round->add_option("--model", o.model, "Checkpoint")->required();
  round->add_option("--output", o.output, "Metrics CSV");
  round->add_option("--reconstruction", o.reconstruction, "Write the reconstruction here");
  round->add_option("--stream", o.stream, "Write the stream here");
  round->add_option("--pairs", o.pairs, "Original/reconstructed CSV");
  add_quant(round);
  add_format(round);

  auto* ablate = app.add_subcommand("ablate", "Train and score the ablation variants");
  ablate->add_option("--input", o.input, "Training recording (omit for synthetic data)");
  ablate->add_option("--test", o.test, "Test recording (omit for synthetic data)");
  ablate->add_option("--test-blocks", o.test_blocks, "Synthetic test blocks");
  ablate->add_option("--repeats", o.repeats, "Seeds averaged per row")->check(CLI::PositiveNumber);
  ablate->add_option("--output", o.output, "Table CSV");
  add_training(ablate);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "asaedct: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*train) return cmd_train(o, out);
    if (*compress) return cmd_compress(o, out);
    if (*decompress) return cmd_decompress(o, out);
    if (*evaluate) return cmd_evaluate(o, out);
    if (*round) return cmd_roundtrip(o, out);
    if (*ablate) return cmd_ablate(o, out);
  } catch (const CliError& e) {
    err << "asaedct: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "asaedct: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "asaedct: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace asaedct::cli
