#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asaedct/dct.hpp"

namespace asaedct {

struct Recording {
  std::vector<double> samples;
  double sample_rate = 100.0;
  std::uint32_t source_bit_depth = 64;
  std::string label;
};

enum class InputFormat {
  kAsciiLines,  // one value per line (Bonn style)
  kCsvColumn,   // first column of a CSV, optional header row
};

/// Blank lines are skipped. Parse errors name the 1-based line number.
Recording load_recording(const std::string& path, InputFormat format,
                         std::uint32_t source_bit_depth = 64,
                         double sample_rate = 100.0);

/// Shortest round-trip formatting, one value per line.
void write_ascii(const std::string& path, std::span<const double> samples);

struct NormalizationParams {
  double scale = 1.0;
  double offset = 0.0;
};

struct NormalizedSignal {
  std::vector<double> samples;
  NormalizationParams params;
};

/// offset = mean, scale = max |x - offset| (1 for a constant signal), so the
/// result lies in [-1, 1].
NormalizedSignal normalize(std::span<const double> samples);
std::vector<double> denormalize(std::span<const double> samples,
                                const NormalizationParams& params);

/// ceil(len / n) blocks; the tail block is zero-padded.
std::vector<Vector> partition_blocks(std::span<const double> samples, Index n);

/// Concatenates blocks and truncates to `sample_count`.
std::vector<double> unpartition_blocks(std::span<const Vector> blocks,
                                       std::size_t sample_count);

/// Synthetic EEG-like corpus: every block is a sum of 1..max_components
/// sinusoids with random frequency, amplitude and phase, plus white noise.
struct SyntheticOptions {
  Index block_size = 64;
  double sample_rate = 100.0;
  int max_components = 5;
  double min_frequency = 0.5;   // Hz
  double max_frequency = 15.0;  // Hz, delta through alpha band
  double noise_level = 0.01;    // noise std relative to unit amplitude
};

std::vector<Vector> synthetic_blocks(std::uint64_t seed, std::size_t count,
                                     const SyntheticOptions& options = {});

/// The blocks of synthetic_blocks laid end to end as one recording.
Recording synthetic_recording(std::uint64_t seed, std::size_t block_count,
                              const SyntheticOptions& options = {});

}  // namespace asaedct
