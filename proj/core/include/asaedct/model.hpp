#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asaedct/dct.hpp"
#include "asaedct/layers.hpp"

namespace asaedct {

/// Order of the per-channel operations inside the DCT layer.
enum class PathOrder {
  kThresholdFirst,  // threshold -> scale -> tanh
  kScaleFirst,      // scale -> threshold -> tanh
};

/// Architecture switches. The defaults describe the full model; the other
/// settings exist for ablation runs.
struct ModelConfig {
  Index block_size = 64;
  Index channels = 3;
  ThresholdKind threshold = ThresholdKind::kHard;
  PathOrder path_order = PathOrder::kThresholdFirst;
  bool encoder_tanh = true;
  bool use_scaling = true;
  // Encoder is DCT + one trainable threshold path; decoder is the IDCT only.
  bool dct_only = false;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Every trainable tensor of the network. Also used as the gradient
/// container, with the same shapes.
struct ModelParams {
  ModelConfig config;
  LinearLayer enc_fc;
  std::vector<Vector> thresholds;  // one per channel, length N
  std::vector<Vector> scalings;    // one per channel, length N
  ChannelMixer mixer;
  LinearLayer dec_fc1;
  LinearLayer dec_fc2;

  Index block_size() const { return config.block_size; }
  Index channels() const { return config.channels; }

  /// Zero tensors shaped like `like`.
  static ModelParams zeros_like(const ModelParams& like);

  /// Visits each tensor the configuration actually trains as a flat span.
  /// The second argument is true for threshold tensors.
  template <class Fn>
  void for_each_trainable(Fn&& fn);
  template <class Fn>
  void for_each_trainable(Fn&& fn) const;

  /// Throws if any tensor shape disagrees with `config`.
  void validate() const;
};

/// Encoder/decoder FCs are identity plus uniform(-noise, noise) with zero
/// bias, thresholds 0.01, scalings 1 + uniform(-noise, noise), mixer 1/C.
ModelParams init_params(std::uint64_t seed, const ModelConfig& config,
                        double noise = 0.01);

struct EncoderActivations {
  Vector input;
  Vector fc_out;
  Vector coeffs;
  std::vector<Vector> threshold_in;
  std::vector<Vector> threshold_out;
  std::vector<Vector> scale_in;
  Matrix paths;  // C x N, output of each path after the nonlinearity
  Vector latent;
};

struct DecoderActivations {
  Vector latent;
  Vector idct_out;
  Vector hidden;  // tanh(dec_fc1(idct_out))
  Vector output;
};

Vector encode_block(const Vector& x, const ModelParams& p);
Vector encode_block(const Vector& x, const ModelParams& p,
                    EncoderActivations& acts);

Vector decode_block(const Vector& y, const ModelParams& p);
Vector decode_block(const Vector& y, const ModelParams& p,
                    DecoderActivations& acts);

struct ForwardResult {
  Vector output;  // z
  Vector latent;  // y
  EncoderActivations encoder;
  DecoderActivations decoder;
};

ForwardResult forward_autoencoder(const Vector& x, const ModelParams& p);

/// Backpropagates dL/dz and an extra dL/dy (the sparsity term) through one
/// cached forward pass, adding the parameter gradients into `grads`.
void accumulate_backward(const ModelParams& p, const ForwardResult& fwd,
                         const Vector& grad_output, const Vector& grad_latent,
                         ModelParams& grads);

/// Multiply-accumulate counts per block, used to check that the encoder is
/// the cheap side.
struct OpCount {
  std::int64_t macs = 0;
  std::int64_t elementwise = 0;
};
OpCount encoder_cost(const ModelConfig& config);
OpCount decoder_cost(const ModelConfig& config);

// ---------------------------------------------------------------------------

template <class Fn>
void ModelParams::for_each_trainable(Fn&& fn) {
  const auto visit = [&fn](auto& tensor, bool is_threshold) {
    fn(std::span<double>(tensor.data(), static_cast<std::size_t>(tensor.size())),
       is_threshold);
  };
  if (!config.dct_only) {
    visit(enc_fc.weight, false);
    visit(enc_fc.bias, false);
  }
  for (auto& t : thresholds) visit(t, true);
  if (!config.dct_only) {
    if (config.use_scaling) {
      for (auto& v : scalings) visit(v, false);
    }
    visit(mixer.weights, false);
    visit(dec_fc1.weight, false);
    visit(dec_fc1.bias, false);
    visit(dec_fc2.weight, false);
    visit(dec_fc2.bias, false);
  }
}

template <class Fn>
void ModelParams::for_each_trainable(Fn&& fn) const {
  const_cast<ModelParams*>(this)->for_each_trainable(
      [&fn](std::span<double> s, bool is_threshold) {
        fn(std::span<const double>(s.data(), s.size()), is_threshold);
      });
}

}  // namespace asaedct
