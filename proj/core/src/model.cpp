#include "asaedct/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "asaedct/error.hpp"

namespace asaedct {
namespace {

constexpr double kInitialThreshold = 0.01;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw Error(ErrorKind::kNonFinite,
                std::string(what) + ": non-finite intermediate value");
  }
}

void require_length(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorKind::kShapeMismatch,
                std::string(what) + ": expected length " + std::to_string(n) +
                    ", got " + std::to_string(v.size()));
  }
}

void require_linear(const LinearLayer& l, Index n, const char* name) {
  if (l.weight.rows() != n || l.weight.cols() != n || l.bias.size() != n) {
    throw Error(ErrorKind::kShapeMismatch,
                std::string(name) + " must be " + std::to_string(n) + "x" +
                    std::to_string(n));
  }
}

Vector tanh_of(const Vector& v) { return v.array().tanh().matrix(); }

LinearLayer noisy_identity(Index n, double noise, std::mt19937_64& rng) {
  LinearLayer layer = LinearLayer::identity(n);
  if (noise > 0.0) {
    std::uniform_real_distribution<double> dist(-noise, noise);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) layer.weight(i, j) += dist(rng);
    }
  }
  return layer;
}

}  // namespace

void ModelConfig::validate() const {
  if (block_size < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "block size must be >= 2, got " + std::to_string(block_size));
  }
  if (channels < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "channel count must be >= 1, got " + std::to_string(channels));
  }
  if (dct_only && channels != 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "the DCT-only model has exactly one channel");
  }
}

ModelParams ModelParams::zeros_like(const ModelParams& like) {
  ModelParams z = like;
  z.enc_fc.weight.setZero();
  z.enc_fc.bias.setZero();
  for (auto& t : z.thresholds) t.setZero();
  for (auto& v : z.scalings) v.setZero();
  z.mixer.weights.setZero();
  z.dec_fc1.weight.setZero();
  z.dec_fc1.bias.setZero();
  z.dec_fc2.weight.setZero();
  z.dec_fc2.bias.setZero();
  return z;
}

void ModelParams::validate() const {
  config.validate();
  const Index n = block_size();
  const auto c = static_cast<std::size_t>(channels());
  require_linear(enc_fc, n, "enc_fc");
  require_linear(dec_fc1, n, "dec_fc1");
  require_linear(dec_fc2, n, "dec_fc2");
  if (thresholds.size() != c || scalings.size() != c ||
      mixer.channels() != channels()) {
    throw Error(ErrorKind::kShapeMismatch,
                "per-channel tensors must have " + std::to_string(c) +
                    " entries");
  }
  for (std::size_t i = 0; i < c; ++i) {
    require_length(thresholds[i], n, "threshold");
    require_length(scalings[i], n, "scaling");
  }
}

ModelParams init_params(std::uint64_t seed, const ModelConfig& config,
                        double noise) {
  config.validate();
  const Index n = config.block_size;
  const Index c = config.channels;
  std::mt19937_64 rng(seed);

  ModelParams p;
  p.config = config;
  p.enc_fc = noisy_identity(n, noise, rng);
  p.thresholds.assign(static_cast<std::size_t>(c),
                      Vector::Constant(n, kInitialThreshold));
  // Identical channels would receive identical gradients forever, so the
  // scalings get the same small perturbation as the FC weights.
  p.scalings.assign(static_cast<std::size_t>(c), Vector::Ones(n));
  if (noise > 0.0) {
    std::uniform_real_distribution<double> dist(-noise, noise);
    for (auto& v : p.scalings) {
      for (Index k = 0; k < n; ++k) v[k] += dist(rng);
    }
  }
  p.mixer.weights = Vector::Constant(c, 1.0 / static_cast<double>(c));
  p.dec_fc1 = noisy_identity(n, noise, rng);
  p.dec_fc2 = noisy_identity(n, noise, rng);
  if (config.dct_only) {
    p.enc_fc = LinearLayer::identity(n);
    p.dec_fc1 = LinearLayer::identity(n);
    p.dec_fc2 = LinearLayer::identity(n);
  }
  return p;
}

Vector encode_block(const Vector& x, const ModelParams& p) {
  EncoderActivations acts;
  return encode_block(x, p, acts);
}

Vector encode_block(const Vector& x, const ModelParams& p,
                    EncoderActivations& acts) {
  const ModelConfig& cfg = p.config;
  const Index n = cfg.block_size;
  const Index c = cfg.channels;
  require_length(x, n, "encode_block");
  require_finite(x, "encode_block");
  const Dct3 dct(n);

  acts.input = x;
  acts.fc_out = cfg.dct_only ? x : linear_forward(x, p.enc_fc);
  acts.coeffs = dct.forward(acts.fc_out);
  acts.threshold_in.resize(static_cast<std::size_t>(c));
  acts.threshold_out.resize(static_cast<std::size_t>(c));
  acts.scale_in.resize(static_cast<std::size_t>(c));
  acts.paths.resize(c, n);

  if (cfg.dct_only) {
    acts.threshold_in[0] = acts.coeffs;
    acts.threshold_out[0] =
        apply_threshold(cfg.threshold, acts.coeffs, p.thresholds[0]);
    acts.scale_in[0] = acts.threshold_out[0];
    acts.paths.row(0) = acts.threshold_out[0].transpose();
    acts.latent = acts.threshold_out[0];
    return acts.latent;
  }

  for (Index i = 0; i < c; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const Vector& t = p.thresholds[ii];
    const Vector& v = p.scalings[ii];
    Vector pre_activation;
    if (cfg.path_order == PathOrder::kThresholdFirst) {
      acts.threshold_in[ii] = acts.coeffs;
      acts.threshold_out[ii] = apply_threshold(cfg.threshold, acts.coeffs, t);
      acts.scale_in[ii] = acts.threshold_out[ii];
      pre_activation = cfg.use_scaling ? scale(acts.scale_in[ii], v)
                                       : acts.scale_in[ii];
    } else {
      acts.scale_in[ii] = acts.coeffs;
      acts.threshold_in[ii] =
          cfg.use_scaling ? scale(acts.coeffs, v) : acts.coeffs;
      acts.threshold_out[ii] =
          apply_threshold(cfg.threshold, acts.threshold_in[ii], t);
      pre_activation = acts.threshold_out[ii];
    }
    acts.paths.row(i) =
        (cfg.encoder_tanh ? tanh_of(pre_activation) : pre_activation)
            .transpose();
  }
  acts.latent = channel_mix(acts.paths, p.mixer);
  require_finite(acts.latent, "encode_block");
  return acts.latent;
}

Vector decode_block(const Vector& y, const ModelParams& p) {
  DecoderActivations acts;
  return decode_block(y, p, acts);
}

Vector decode_block(const Vector& y, const ModelParams& p,
                    DecoderActivations& acts) {
  const Index n = p.block_size();
  require_length(y, n, "decode_block");
  const Dct3 dct(n);
  acts.latent = y;
  acts.idct_out = dct.inverse(y);
  if (p.config.dct_only) {
    acts.hidden = acts.idct_out;
    acts.output = acts.idct_out;
    return acts.output;
  }
  acts.hidden = tanh_of(linear_forward(acts.idct_out, p.dec_fc1));
  acts.output = linear_forward(acts.hidden, p.dec_fc2);
  require_finite(acts.output, "decode_block");
  return acts.output;
}

ForwardResult forward_autoencoder(const Vector& x, const ModelParams& p) {
  ForwardResult r;
  r.latent = encode_block(x, p, r.encoder);
  r.output = decode_block(r.latent, p, r.decoder);
  return r;
}

void accumulate_backward(const ModelParams& p, const ForwardResult& fwd,
                         const Vector& grad_output, const Vector& grad_latent,
                         ModelParams& grads) {
  const ModelConfig& cfg = p.config;
  const Index n = cfg.block_size;
  const Index c = cfg.channels;
  const Dct3 dct(n);
  const EncoderActivations& enc = fwd.encoder;
  const DecoderActivations& dec = fwd.decoder;

  // Decoder: z = W2 s + b2, s = tanh(W1 u + b1), u = D^T y.
  Vector grad_idct;
  if (cfg.dct_only) {
    grad_idct = grad_output;
  } else {
    const LinearGrad g2 = linear_backward(dec.hidden, p.dec_fc2, grad_output);
    grads.dec_fc2.weight += g2.dweight;
    grads.dec_fc2.bias += g2.dbias;
    const Vector grad_pre =
        g2.dx.cwiseProduct((1.0 - dec.hidden.array().square()).matrix());
    const LinearGrad g1 = linear_backward(dec.idct_out, p.dec_fc1, grad_pre);
    grads.dec_fc1.weight += g1.dweight;
    grads.dec_fc1.bias += g1.dbias;
    grad_idct = g1.dx;
  }
  // u = D^T y  =>  dL/dy = D dL/du.
  const Vector grad_y = dct.matrix() * grad_idct + grad_latent;

  Vector grad_coeffs = Vector::Zero(n);
  if (cfg.dct_only) {
    const ThresholdGrad tg =
        threshold_backward(enc.threshold_in[0], p.thresholds[0], grad_y);
    grads.thresholds[0] += tg.dt;
    grad_coeffs = tg.dx;
  } else {
    const MixGrad mg = channel_mix_backward(enc.paths, p.mixer, grad_y);
    grads.mixer.weights += mg.dweights;
    for (Index i = 0; i < c; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const Vector& v = p.scalings[ii];
      Vector grad_pre = mg.dr.row(i).transpose();
      if (cfg.encoder_tanh) {
        grad_pre = grad_pre.cwiseProduct(
            (1.0 - enc.paths.row(i).transpose().array().square()).matrix());
      }
      if (cfg.path_order == PathOrder::kThresholdFirst) {
        Vector grad_thr_out = grad_pre;
        if (cfg.use_scaling) {
          const ScaleGrad sg = scale_backward(enc.scale_in[ii], v, grad_pre);
          grads.scalings[ii] += sg.dv;
          grad_thr_out = sg.dx;
        }
        const ThresholdGrad tg = threshold_backward(
            enc.threshold_in[ii], p.thresholds[ii], grad_thr_out);
        grads.thresholds[ii] += tg.dt;
        grad_coeffs += tg.dx;
      } else {
        const ThresholdGrad tg = threshold_backward(
            enc.threshold_in[ii], p.thresholds[ii], grad_pre);
        grads.thresholds[ii] += tg.dt;
        if (cfg.use_scaling) {
          const ScaleGrad sg = scale_backward(enc.scale_in[ii], v, tg.dx);
          grads.scalings[ii] += sg.dv;
          grad_coeffs += sg.dx;
        } else {
          grad_coeffs += tg.dx;
        }
      }
    }
  }

  if (!cfg.dct_only) {
    // X = D a  =>  dL/da = D^T dL/dX.
    const Vector grad_fc = dct.matrix().transpose() * grad_coeffs;
    grads.enc_fc.weight += grad_fc * enc.input.transpose();
    grads.enc_fc.bias += grad_fc;
  }
}

OpCount encoder_cost(const ModelConfig& config) {
  const std::int64_t n = config.block_size;
  const std::int64_t c = config.channels;
  OpCount cost;
  if (config.dct_only) {
    cost.macs = n * n;
    cost.elementwise = n;
    return cost;
  }
  cost.macs = n * n       // encoder FC
              + n * n     // DCT
              + c * n;    // 1x1 mixer
  cost.elementwise = c * n * (1 + (config.use_scaling ? 1 : 0) +
                              (config.encoder_tanh ? 1 : 0));
  return cost;
}

OpCount decoder_cost(const ModelConfig& config) {
  const std::int64_t n = config.block_size;
  OpCount cost;
  if (config.dct_only) {
    cost.macs = n * n;
    return cost;
  }
  cost.macs = 3 * n * n;  // IDCT + two FCs
  cost.elementwise = n;   // tanh between the FCs
  return cost;
}

}  // namespace asaedct
