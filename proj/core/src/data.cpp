#include "asaedct/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string_view>

#include "asaedct/error.hpp"

namespace asaedct {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

Recording load_recording(const std::string& path, InputFormat format,
                         std::uint32_t source_bit_depth, double sample_rate) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");

  Recording rec;
  rec.sample_rate = sample_rate;
  rec.source_bit_depth = source_bit_depth;
  rec.label = path;

  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view field = trim(line);
    if (field.empty()) continue;
    if (format == InputFormat::kCsvColumn) {
      field = trim(field.substr(0, field.find(',')));
    }
    double value = 0.0;
    if (!parse_double(field, value)) {
      // A CSV may start with one header row.
      if (format == InputFormat::kCsvColumn && !seen_content) {
        seen_content = true;
        continue;
      }
      throw Error(ErrorKind::kParse, path + ":" + std::to_string(line_no) +
                                         ": cannot parse '" +
                                         std::string(field) + "' as a number");
    }
    seen_content = true;
    rec.samples.push_back(value);
  }
  if (rec.samples.empty()) {
    throw Error(ErrorKind::kParse, path + ": no samples");
  }
  return rec;
}

void write_ascii(const std::string& path, std::span<const double> samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot create '" + path + "'");
  char buf[64];
  for (double v : samples) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, ptr - buf);
    out.put('\n');
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

NormalizedSignal normalize(std::span<const double> samples) {
  NormalizedSignal out;
  if (samples.empty()) return out;
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double offset = sum / static_cast<double>(samples.size());
  double scale = 0.0;
  for (double v : samples) scale = std::max(scale, std::abs(v - offset));
  if (scale == 0.0) scale = 1.0;
  out.params = {scale, offset};
  out.samples.reserve(samples.size());
  for (double v : samples) {
    out.samples.push_back(std::clamp((v - offset) / scale, -1.0, 1.0));
  }
  return out;
}

std::vector<double> denormalize(std::span<const double> samples,
                                const NormalizationParams& params) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (double v : samples) out.push_back(v * params.scale + params.offset);
  return out;
}

std::vector<Vector> partition_blocks(std::span<const double> samples,
                                     Index n) {
  if (n < 2) {
    throw Error(ErrorKind::kInvalidArgument, "block length must be >= 2");
  }
  const auto un = static_cast<std::size_t>(n);
  std::vector<Vector> blocks;
  blocks.reserve((samples.size() + un - 1) / un);
  for (std::size_t start = 0; start < samples.size(); start += un) {
    Vector block = Vector::Zero(n);
    const std::size_t len = std::min(un, samples.size() - start);
    for (std::size_t i = 0; i < len; ++i) {
      block[static_cast<Index>(i)] = samples[start + i];
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::vector<double> unpartition_blocks(std::span<const Vector> blocks,
                                       std::size_t sample_count) {
  std::vector<double> out;
  out.reserve(sample_count);
  for (const auto& block : blocks) {
    for (Index i = 0; i < block.size() && out.size() < sample_count; ++i) {
      out.push_back(block[i]);
    }
  }
  if (out.size() != sample_count) {
    throw Error(ErrorKind::kShapeMismatch,
                "unpartition: blocks hold fewer than " +
                    std::to_string(sample_count) + " samples");
  }
  return out;
}

std::vector<Vector> synthetic_blocks(std::uint64_t seed, std::size_t count,
                                     const SyntheticOptions& opt) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_components(1, opt.max_components);
  std::uniform_real_distribution<double> freq(opt.min_frequency,
                                              opt.max_frequency);
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, opt.noise_level);

  std::vector<Vector> blocks;
  blocks.reserve(count);
  for (std::size_t b = 0; b < count; ++b) {
    Vector block = Vector::Zero(opt.block_size);
    const int components = n_components(rng);
    for (int c = 0; c < components; ++c) {
      const double f = freq(rng);
      const double a = amp(rng);
      const double ph = phase(rng);
      for (Index i = 0; i < opt.block_size; ++i) {
        const double t = static_cast<double>(i) / opt.sample_rate;
        block[i] += a * std::sin(2.0 * std::numbers::pi * f * t + ph);
      }
    }
    for (Index i = 0; i < opt.block_size; ++i) block[i] += noise(rng);
    blocks.push_back(std::move(block));
  }
  return blocks;
}

Recording synthetic_recording(std::uint64_t seed, std::size_t block_count,
                              const SyntheticOptions& options) {
  Recording rec;
  rec.sample_rate = options.sample_rate;
  rec.label = "synthetic:" + std::to_string(seed);
  for (const auto& block : synthetic_blocks(seed, block_count, options)) {
    rec.samples.insert(rec.samples.end(), block.data(),
                       block.data() + block.size());
  }
  return rec;
}

}  // namespace asaedct
