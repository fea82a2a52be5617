#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace asaedct {

struct Metrics {
  double cr = 0.0;
  double prd = 0.0;
  double qs = 0.0;  // +inf when prd == 0
};

/// original_bits / compressed_bits.
double compression_ratio(std::uint64_t original_bits,
                         std::uint64_t compressed_bits);

/// 100 * sqrt(sum (x - z)^2 / sum x^2), no mean removal.
double prd(std::span<const double> original,
           std::span<const double> reconstructed);

/// cr / prd; returns +infinity for a perfect reconstruction.
double quality_score(double cr, double prd_percent);

/// CR from sample count x bit depth against the stored stream size, PRD on
/// the signals as given (callers pass original units).
Metrics evaluate_metrics(std::span<const double> original,
                         std::span<const double> reconstructed,
                         std::uint32_t source_bit_depth,
                         std::uint64_t compressed_bytes);

/// Formats a metric for CSV/table output; infinities print as "inf".
std::string format_metric(double value, int precision = 4);

}  // namespace asaedct
