#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asaedct/codec.hpp"
#include "asaedct/data.hpp"
#include "asaedct/metrics.hpp"
#include "asaedct/model.hpp"
#include "asaedct/training.hpp"

namespace asaedct {

struct CompressOptions {
  int theta = 4;
  int phi = 5;
  std::uint32_t lzma_preset = kDefaultLzmaPreset;
};

struct CompressResult {
  std::vector<std::uint8_t> stream;
  double zero_fraction = 0.0;   // of the quantized latent
  double encode_seconds = 0.0;  // normalize + encode + quantize + entropy code
};

/// normalize -> partition -> encode -> quantize -> RLE + xz.
CompressResult compress_recording(const Recording& recording,
                                  const ModelParams& params,
                                  const CompressOptions& options = {});

struct DecompressResult {
  StreamHeader header;
  std::vector<double> samples;  // original units, padding removed
};

/// Throws kShapeMismatch if the stream's N or C disagree with the model.
DecompressResult decompress_recording(std::span<const std::uint8_t> stream,
                                      const ModelParams& params);

struct RoundTripResult {
  CompressResult compressed;
  DecompressResult decompressed;
  Metrics metrics;
};

RoundTripResult roundtrip(const Recording& recording, const ModelParams& params,
                          const CompressOptions& options = {});

/// Normalizes and partitions a recording, then trains on its blocks.
TrainResult train_on_recording(const Recording& recording,
                               const ModelConfig& model,
                               const TrainConfig& cfg);

/// One row of the ablation table: a named architecture/training variant.
struct AblationVariant {
  std::string name;
  ModelConfig model;
  TrainConfig train;
};

/// The nine standard rows derived from `model` and `train`: no encoder
/// nonlinearity, no scaling, no penalty, DCT only, soft threshold, and
/// C = 1, 2, 3 (the full model), 4.
std::vector<AblationVariant> ablation_variants(const ModelConfig& model,
                                               const TrainConfig& train);

struct AblationResult {
  std::string name;
  Metrics metrics;
  double zero_fraction = 0.0;
  int epochs = 0;
};

/// Trains the variant on `train_set` and scores it on `test_set`.
AblationResult run_ablation_variant(const AblationVariant& variant,
                                    const Recording& train_set,
                                    const Recording& test_set,
                                    const CompressOptions& options = {});

}  // namespace asaedct
