#pragma once

#include "asaedct/dct.hpp"

// Differentiable building blocks with hand-written backward passes.
// Every backward takes the upstream gradient dL/d(out) and returns the
// gradients with respect to the layer inputs and parameters.

namespace asaedct {

enum class ThresholdKind { kHard, kSoft };

/// sign(v) with sign(0) == 0.
inline double sign(double v) { return static_cast<double>((0.0 < v) - (v < 0.0)); }

/// sign(x) * max(|x| - t, 0)
Vector soft_threshold(const Vector& x, const Vector& t);

/// S_t(x) + t * sign(S_t(x)), i.e. x where |x| > t and 0 elsewhere.
/// Evaluated as a mask so kept entries are bit-identical to the input.
Vector hard_threshold(const Vector& x, const Vector& t);

Vector apply_threshold(ThresholdKind kind, const Vector& x, const Vector& t);

struct ThresholdGrad {
  Vector dx;
  Vector dt;
};

/// Shared by both kinds. For the hard threshold the true derivative with
/// respect to t vanishes almost everywhere; the additive t * sign(.) term is
/// held constant instead, giving dout/dt = -sign(x) on kept entries.
ThresholdGrad threshold_backward(const Vector& x, const Vector& t,
                                 const Vector& grad_out);

Vector scale(const Vector& x, const Vector& v);

struct ScaleGrad {
  Vector dx;
  Vector dv;
};

ScaleGrad scale_backward(const Vector& x, const Vector& v,
                         const Vector& grad_out);

struct LinearLayer {
  Matrix weight;
  Vector bias;

  static LinearLayer identity(Index n);

  Index in_features() const { return weight.cols(); }
  Index out_features() const { return weight.rows(); }
};

struct LinearGrad {
  Vector dx;
  Matrix dweight;
  Vector dbias;
};

Vector linear_forward(const Vector& x, const LinearLayer& layer);
LinearGrad linear_backward(const Vector& x, const LinearLayer& layer,
                           const Vector& grad_out);

/// 1x1 convolution from C channels to one, without bias, so that columns
/// of zeros stay exactly zero.
struct ChannelMixer {
  Vector weights;

  Index channels() const { return weights.size(); }
};

struct MixGrad {
  Matrix dr;
  Vector dweights;
};

/// r is C x N (one channel per row).
Vector channel_mix(const Matrix& r, const ChannelMixer& mixer);
MixGrad channel_mix_backward(const Matrix& r, const ChannelMixer& mixer,
                             const Vector& grad_out);

}  // namespace asaedct
