#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asaedct/model.hpp"

namespace asaedct {

enum class StopRule {
  // Stop once the quantized-latent zero fraction reaches xi and validation
  // MSE has stopped improving.
  kSparsityPlateau,
  // Stop as soon as the zero fraction drops below xi.
  kZeroFractionBelowXi,
};

struct TrainConfig {
  // 1/N for N=64: the only target whose penalty can reach zero.
  double alpha = 0.015625;
  double lambda = 10.0;
  double lr = 1e-3;
  std::size_t batch_size = 16;
  double xi = 0.6;
  int max_epochs = 200;
  std::uint64_t seed = 0;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Quantizer used to measure the latent zero fraction.
  int theta = 4;
  int phi = 5;
  StopRule stop_rule = StopRule::kSparsityPlateau;
  double validation_fraction = 0.1;
  int plateau_epochs = 5;
  double plateau_tolerance = 0.01;
  // Restrict the returned best epoch to those meeting xi, once any does.
  bool select_sparse = true;
  // Amplitude of the identity-perturbation noise at initialization.
  double init_noise = 0.01;

  void validate() const;
};

/// Softmax of |y|, computed with max subtraction.
Vector activity(const Vector& y);

/// sum_j alpha log(alpha / yhat_j) + (1 - alpha) log((1 - alpha) / (1 - yhat_j)),
/// with yhat clamped into [1e-12, 1 - 1e-12].
double kld_penalty(const Vector& yhat, double alpha);

/// d/dy of kld_penalty(activity(y), alpha).
Vector kld_penalty_gradient(const Vector& y, double alpha);

struct LossTerms {
  double total = 0.0;
  double mse = 0.0;
  double kld = 0.0;  // unweighted penalty
};

LossTerms loss_terms(const Vector& x, const Vector& z, const Vector& y,
                     const TrainConfig& cfg);
double total_loss(const Vector& x, const Vector& z, const Vector& y,
                  const TrainConfig& cfg);

struct BatchGradients {
  ModelParams grads;
  LossTerms loss;  // batch mean
};

/// Gradient of the batch-mean loss for every parameter tensor. Summation
/// follows batch order. Throws kDivergence on a non-finite gradient.
BatchGradients compute_gradients(std::span<const Vector> batch,
                                 const ModelParams& params,
                                 const TrainConfig& cfg);

struct AdamWState {
  ModelParams m;
  ModelParams v;
  std::int64_t step = 0;

  static AdamWState init(const ModelParams& params);
};

/// Decoupled weight decay Adam; thresholds are clamped to >= 0 afterwards.
void adamw_step(ModelParams& params, const ModelParams& grads,
                AdamWState& state, const TrainConfig& cfg);

LossTerms dataset_loss(std::span<const Vector> blocks,
                       const ModelParams& params, const TrainConfig& cfg);

/// Fraction of exact zeros in the quantized latents of `blocks`.
double latent_zero_fraction(std::span<const Vector> blocks,
                            const ModelParams& params, int theta, int phi);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // training-set mean of the total loss
  double mse = 0.0;
  double kld = 0.0;
  double zero_fraction = 0.0;  // validation split, quantized latent
  double seconds = 0.0;
  double val_loss = 0.0;
  double val_mse = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double eps = 0.0;
  double weight_decay = 0.0;

  /// epoch,loss,mse,kld,zero_fraction,seconds preceded by '#' metadata lines.
  void write_csv(const std::string& path) const;
};

struct TrainResult {
  ModelParams params;
  TrainHistory history;
  int best_epoch = -1;  // -1: initial parameters
  double initial_loss = 0.0;
  double final_loss = 0.0;  // training-split loss of the returned params
  bool stopped_by_rule = false;
};

TrainResult train(std::span<const Vector> dataset, const ModelConfig& model,
                  const TrainConfig& cfg);
TrainResult train(std::span<const Vector> dataset, ModelParams initial,
                  const TrainConfig& cfg);

}  // namespace asaedct
