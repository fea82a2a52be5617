#include "asaedct/layers.hpp"

#include <cmath>
#include <string>

#include "asaedct/error.hpp"

namespace asaedct {
namespace {

void require_same_length(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kShapeMismatch,
                std::string(what) + ": length mismatch (" +
                    std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
}

void require_thresholds(const Vector& x, const Vector& t, const char* what) {
  require_same_length(x, t, what);
  if ((t.array() < 0.0).any()) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + ": thresholds must be non-negative");
  }
}

}  // namespace

Vector soft_threshold(const Vector& x, const Vector& t) {
  require_thresholds(x, t, "soft_threshold");
  Vector out(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    out[k] = sign(x[k]) * std::max(std::abs(x[k]) - t[k], 0.0);
  }
  return out;
}

Vector hard_threshold(const Vector& x, const Vector& t) {
  require_thresholds(x, t, "hard_threshold");
  Vector out(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    out[k] = std::abs(x[k]) > t[k] ? x[k] : 0.0;
  }
  return out;
}

Vector apply_threshold(ThresholdKind kind, const Vector& x, const Vector& t) {
  return kind == ThresholdKind::kHard ? hard_threshold(x, t)
                                      : soft_threshold(x, t);
}

ThresholdGrad threshold_backward(const Vector& x, const Vector& t,
                                 const Vector& grad_out) {
  require_same_length(x, t, "threshold_backward");
  require_same_length(x, grad_out, "threshold_backward");
  ThresholdGrad g{Vector::Zero(x.size()), Vector::Zero(x.size())};
  for (Index k = 0; k < x.size(); ++k) {
    if (std::abs(x[k]) > t[k]) {
      g.dx[k] = grad_out[k];
      g.dt[k] = -sign(x[k]) * grad_out[k];
    }
  }
  return g;
}

Vector scale(const Vector& x, const Vector& v) {
  require_same_length(x, v, "scale");
  return x.cwiseProduct(v);
}

ScaleGrad scale_backward(const Vector& x, const Vector& v,
                         const Vector& grad_out) {
  require_same_length(x, v, "scale_backward");
  require_same_length(x, grad_out, "scale_backward");
  return {grad_out.cwiseProduct(v), grad_out.cwiseProduct(x)};
}

LinearLayer LinearLayer::identity(Index n) {
  return {Matrix::Identity(n, n), Vector::Zero(n)};
}

Vector linear_forward(const Vector& x, const LinearLayer& layer) {
  if (x.size() != layer.in_features() ||
      layer.bias.size() != layer.out_features()) {
    throw Error(ErrorKind::kShapeMismatch, "linear_forward: shape mismatch");
  }
  return layer.weight * x + layer.bias;
}

LinearGrad linear_backward(const Vector& x, const LinearLayer& layer,
                           const Vector& grad_out) {
  if (x.size() != layer.in_features() ||
      grad_out.size() != layer.out_features()) {
    throw Error(ErrorKind::kShapeMismatch, "linear_backward: shape mismatch");
  }
  return {layer.weight.transpose() * grad_out, grad_out * x.transpose(),
          grad_out};
}

Vector channel_mix(const Matrix& r, const ChannelMixer& mixer) {
  if (r.rows() != mixer.channels()) {
    throw Error(ErrorKind::kShapeMismatch,
                "channel_mix: expected " + std::to_string(mixer.channels()) +
                    " channels, got " + std::to_string(r.rows()));
  }
  return r.transpose() * mixer.weights;
}

MixGrad channel_mix_backward(const Matrix& r, const ChannelMixer& mixer,
                             const Vector& grad_out) {
  if (r.rows() != mixer.channels() || r.cols() != grad_out.size()) {
    throw Error(ErrorKind::kShapeMismatch,
                "channel_mix_backward: shape mismatch");
  }
  return {mixer.weights * grad_out.transpose(), r * grad_out};
}

}  // namespace asaedct
