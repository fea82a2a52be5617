#include "asaedct/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "asaedct/error.hpp"

namespace asaedct {

CompressResult compress_recording(const Recording& recording,
                                  const ModelParams& params,
                                  const CompressOptions& options) {
  if (recording.samples.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot compress an empty recording");
  }
  const auto start = std::chrono::steady_clock::now();
  const NormalizedSignal norm = normalize(recording.samples);
  const std::vector<Vector> blocks =
      partition_blocks(norm.samples, params.block_size());

  std::vector<QuantizedBlock> quantized;
  quantized.reserve(blocks.size());
  std::size_t zeros = 0;
  for (const Vector& block : blocks) {
    quantized.push_back(
        quantize(encode_block(block, params), options.theta, options.phi));
    zeros += static_cast<std::size_t>(
        std::count(quantized.back().begin(), quantized.back().end(), 0));
  }

  StreamHeader header;
  header.block_size = static_cast<std::uint32_t>(params.block_size());
  header.channels = static_cast<std::uint32_t>(params.channels());
  header.theta = options.theta;
  header.phi = options.phi;
  header.block_count = blocks.size();
  header.sample_count = recording.samples.size();
  header.norm_scale = norm.params.scale;
  header.norm_offset = norm.params.offset;
  header.source_bit_depth = recording.source_bit_depth;
  header.lzma_preset = options.lzma_preset;

  CompressResult out;
  out.stream = compress_stream(quantized, header);
  out.encode_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start).count();
  out.zero_fraction = static_cast<double>(zeros) /
                      static_cast<double>(blocks.size() * header.block_size);
  return out;
}

DecompressResult decompress_recording(std::span<const std::uint8_t> stream,
                                      const ModelParams& params) {
  DecodedStream decoded = decompress_stream(stream);
  const StreamHeader& h = decoded.header;
  if (h.block_size != static_cast<std::uint32_t>(params.block_size()) ||
      h.channels != static_cast<std::uint32_t>(params.channels())) {
    throw Error(ErrorKind::kShapeMismatch,
                "stream was produced with N=" + std::to_string(h.block_size) +
                    ", C=" + std::to_string(h.channels) +
                    " but the model has N=" +
                    std::to_string(params.block_size()) +
                    ", C=" + std::to_string(params.channels()));
  }
  std::vector<Vector> blocks;
  blocks.reserve(decoded.blocks.size());
  for (const auto& q : decoded.blocks) {
    blocks.push_back(decode_block(dequantize(q, h.theta, h.phi), params));
  }
  const std::vector<double> normalized =
      unpartition_blocks(blocks, static_cast<std::size_t>(h.sample_count));
  return {h, denormalize(normalized, {h.norm_scale, h.norm_offset})};
}

RoundTripResult roundtrip(const Recording& recording, const ModelParams& params,
                          const CompressOptions& options) {
  RoundTripResult r;
  r.compressed = compress_recording(recording, params, options);
  r.decompressed = decompress_recording(r.compressed.stream, params);
  r.metrics = evaluate_metrics(recording.samples, r.decompressed.samples,
                               recording.source_bit_depth,
                               r.compressed.stream.size());
  return r;
}

TrainResult train_on_recording(const Recording& recording,
                               const ModelConfig& model,
                               const TrainConfig& cfg) {
  const NormalizedSignal norm = normalize(recording.samples);
  const std::vector<Vector> blocks =
      partition_blocks(norm.samples, model.block_size);
  return train(blocks, model, cfg);
}

std::vector<AblationVariant> ablation_variants(const ModelConfig& model,
                                               const TrainConfig& train) {
  std::vector<AblationVariant> out;
  const auto add = [&](std::string name, auto&& tweak) {
    AblationVariant v{std::move(name), model, train};
    tweak(v);
    out.push_back(std::move(v));
  };
  add("No nonlinearity", [](AblationVariant& v) { v.model.encoder_tanh = false; });
  add("No scaling", [](AblationVariant& v) { v.model.use_scaling = false; });
  add("No penalty", [](AblationVariant& v) { v.train.lambda = 0.0; });
  add("Only DCT", [](AblationVariant& v) {
    v.model.dct_only = true;
    v.model.channels = 1;
  });
  add("With soft-threshold",
      [](AblationVariant& v) { v.model.threshold = ThresholdKind::kSoft; });
  for (Index c = 1; c <= 4; ++c) {
    const std::string name = c == 3 ? "ASAEDCT (C=3)" : "C=" + std::to_string(c);
    add(name, [c](AblationVariant& v) { v.model.channels = c; });
  }
  return out;
}

AblationResult run_ablation_variant(const AblationVariant& variant,
                                    const Recording& train_set,
                                    const Recording& test_set,
                                    const CompressOptions& options) {
  const TrainResult trained =
      train_on_recording(train_set, variant.model, variant.train);
  const RoundTripResult rt = roundtrip(test_set, trained.params, options);
  AblationResult out;
  out.name = variant.name;
  out.metrics = rt.metrics;
  out.zero_fraction = rt.compressed.zero_fraction;
  out.epochs = static_cast<int>(trained.history.epochs.size());
  return out;
}

}  // namespace asaedct
