#include "asaedct/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "asaedct/error.hpp"

namespace asaedct {

double compression_ratio(std::uint64_t original_bits,
                         std::uint64_t compressed_bits) {
  if (compressed_bits == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "compression ratio: compressed size is zero");
  }
  if (original_bits == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "compression ratio: original size is zero");
  }
  return static_cast<double>(original_bits) /
         static_cast<double>(compressed_bits);
}

double prd(std::span<const double> original,
           std::span<const double> reconstructed) {
  if (original.size() != reconstructed.size()) {
    throw Error(ErrorKind::kShapeMismatch, "prd: length mismatch");
  }
  double err = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double d = original[i] - reconstructed[i];
    err += d * d;
    energy += original[i] * original[i];
  }
  if (energy == 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "prd: original has zero energy");
  }
  return 100.0 * std::sqrt(err / energy);
}

double quality_score(double cr, double prd_percent) {
  if (prd_percent < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "quality score: negative PRD");
  }
  if (prd_percent == 0.0) return std::numeric_limits<double>::infinity();
  return cr / prd_percent;
}

Metrics evaluate_metrics(std::span<const double> original,
                         std::span<const double> reconstructed,
                         std::uint32_t source_bit_depth,
                         std::uint64_t compressed_bytes) {
  Metrics m;
  m.cr = compression_ratio(
      static_cast<std::uint64_t>(original.size()) * source_bit_depth,
      compressed_bytes * 8);
  m.prd = prd(original, reconstructed);
  m.qs = quality_score(m.cr, m.prd);
  return m;
}

std::string format_metric(double value, int precision) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

}  // namespace asaedct
