#include "asaedct/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "asaedct/codec.hpp"
#include "asaedct/error.hpp"

namespace asaedct {
namespace {

constexpr double kActivityClamp = 1e-12;

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

bool all_finite(const ModelParams& g) {
  bool ok = true;
  g.for_each_trainable([&ok](std::span<const double> s, bool) {
    for (double v : s) ok = ok && std::isfinite(v);
  });
  return ok;
}

}  // namespace

void TrainConfig::validate() const {
  require_alpha(alpha);
  if (!(lambda >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda must be >= 0");
  if (!(lr > 0.0)) throw Error(ErrorKind::kInvalidArgument, "learning rate must be > 0");
  if (batch_size == 0) throw Error(ErrorKind::kInvalidArgument, "batch size must be positive");
  if (!(xi > 0.0 && xi < 1.0)) throw Error(ErrorKind::kInvalidArgument, "xi must lie in (0, 1)");
  if (max_epochs < 0) throw Error(ErrorKind::kInvalidArgument, "max_epochs must be >= 0");
  if (!(weight_decay >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "weight decay must be >= 0");
  if (phi == 0) throw Error(ErrorKind::kInvalidArgument, "phi must be nonzero");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "validation fraction must lie in [0, 1)");
  }
}

Vector activity(const Vector& y) {
  if (!y.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "activity: non-finite latent");
  }
  const Vector a = y.cwiseAbs();
  const Vector e = (a.array() - a.maxCoeff()).exp().matrix();
  return e / e.sum();
}

double kld_penalty(const Vector& yhat, double alpha) {
  require_alpha(alpha);
  double sum = 0.0;
  for (Index j = 0; j < yhat.size(); ++j) {
    const double p = std::clamp(yhat[j], kActivityClamp, 1.0 - kActivityClamp);
    sum += alpha * std::log(alpha / p) +
           (1.0 - alpha) * std::log((1.0 - alpha) / (1.0 - p));
  }
  return sum;
}

Vector kld_penalty_gradient(const Vector& y, double alpha) {
  require_alpha(alpha);
  const Vector p = activity(y);
  const Index n = y.size();
  Vector g(n);
  for (Index j = 0; j < n; ++j) {
    const bool clamped = p[j] < kActivityClamp || p[j] > 1.0 - kActivityClamp;
    g[j] = clamped ? 0.0 : -alpha / p[j] + (1.0 - alpha) / (1.0 - p[j]);
  }
  // Softmax Jacobian: d p_j / d a_k = p_j (delta_jk - p_k).
  const double mean_g = p.dot(g);
  Vector out(n);
  for (Index j = 0; j < n; ++j) {
    out[j] = p[j] * (g[j] - mean_g) * sign(y[j]);
  }
  return out;
}

LossTerms loss_terms(const Vector& x, const Vector& z, const Vector& y,
                     const TrainConfig& cfg) {
  if (x.size() != z.size() || x.size() != y.size()) {
    throw Error(ErrorKind::kShapeMismatch, "total_loss: length mismatch");
  }
  LossTerms t;
  t.mse = (x - z).squaredNorm() / static_cast<double>(x.size());
  t.kld = cfg.lambda == 0.0 ? 0.0 : kld_penalty(activity(y), cfg.alpha);
  t.total = t.mse + cfg.lambda * t.kld;
  return t;
}

double total_loss(const Vector& x, const Vector& z, const Vector& y,
                  const TrainConfig& cfg) {
  return loss_terms(x, z, y, cfg).total;
}

BatchGradients compute_gradients(std::span<const Vector> batch,
                                 const ModelParams& params,
                                 const TrainConfig& cfg) {
  if (batch.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "compute_gradients: empty batch");
  }
  BatchGradients out{ModelParams::zeros_like(params), {}};
  const double n = static_cast<double>(params.block_size());
  const Vector no_latent_grad = Vector::Zero(params.block_size());
  for (const Vector& x : batch) {
    const ForwardResult fwd = forward_autoencoder(x, params);
    const LossTerms t = loss_terms(x, fwd.output, fwd.latent, cfg);
    out.loss.total += t.total;
    out.loss.mse += t.mse;
    out.loss.kld += t.kld;
    const Vector grad_output = (2.0 / n) * (fwd.output - x);
    const Vector grad_latent =
        cfg.lambda == 0.0
            ? no_latent_grad
            : Vector(cfg.lambda * kld_penalty_gradient(fwd.latent, cfg.alpha));
    accumulate_backward(params, fwd, grad_output, grad_latent, out.grads);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.grads.for_each_trainable([inv](std::span<double> s, bool) {
    for (double& v : s) v *= inv;
  });
  out.loss.total *= inv;
  out.loss.mse *= inv;
  out.loss.kld *= inv;
  if (!all_finite(out.grads) || !std::isfinite(out.loss.total)) {
    throw Error(ErrorKind::kDivergence,
                "non-finite gradient or loss; training diverged (loss=" +
                    std::to_string(out.loss.total) + ")");
  }
  return out;
}

AdamWState AdamWState::init(const ModelParams& params) {
  return {ModelParams::zeros_like(params), ModelParams::zeros_like(params), 0};
}

void adamw_step(ModelParams& params, const ModelParams& grads,
                AdamWState& state, const TrainConfig& cfg) {
  if (grads.config != params.config || state.m.config != params.config) {
    throw Error(ErrorKind::kShapeMismatch, "adamw_step: configuration mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  const double decay = 1.0 - cfg.lr * cfg.weight_decay;

  // Walk all four containers in lockstep; the visitation order is fixed.
  std::vector<std::span<double>> p_spans, m_spans, v_spans;
  std::vector<std::span<const double>> g_spans;
  std::vector<bool> is_threshold;
  params.for_each_trainable([&](std::span<double> s, bool thr) {
    p_spans.push_back(s);
    is_threshold.push_back(thr);
  });
  grads.for_each_trainable([&](std::span<const double> s, bool) { g_spans.push_back(s); });
  state.m.for_each_trainable([&](std::span<double> s, bool) { m_spans.push_back(s); });
  state.v.for_each_trainable([&](std::span<double> s, bool) { v_spans.push_back(s); });

  for (std::size_t k = 0; k < p_spans.size(); ++k) {
    auto p = p_spans[k];
    auto g = g_spans[k];
    auto m = m_spans[k];
    auto v = v_spans[k];
    if (g.size() != p.size()) {
      throw Error(ErrorKind::kShapeMismatch, "adamw_step: tensor shape mismatch");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] = p[i] * decay - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
      if (is_threshold[k]) p[i] = std::max(p[i], 0.0);
    }
  }
}

LossTerms dataset_loss(std::span<const Vector> blocks,
                       const ModelParams& params, const TrainConfig& cfg) {
  LossTerms sum;
  if (blocks.empty()) return sum;
  for (const Vector& x : blocks) {
    const ForwardResult fwd = forward_autoencoder(x, params);
    const LossTerms t = loss_terms(x, fwd.output, fwd.latent, cfg);
    sum.total += t.total;
    sum.mse += t.mse;
    sum.kld += t.kld;
  }
  const double inv = 1.0 / static_cast<double>(blocks.size());
  return {sum.total * inv, sum.mse * inv, sum.kld * inv};
}

double latent_zero_fraction(std::span<const Vector> blocks,
                            const ModelParams& params, int theta, int phi) {
  std::size_t zeros = 0;
  std::size_t total = 0;
  for (const Vector& x : blocks) {
    const QuantizedBlock q = quantize(encode_block(x, params), theta, phi);
    zeros += static_cast<std::size_t>(std::count(q.begin(), q.end(), 0));
    total += q.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(total);
}

void TrainHistory::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot create '" + path + "'");
  out << "# optimizer=adamw beta1=" << beta1 << " beta2=" << beta2
      << " eps=" << eps << " weight_decay=" << weight_decay << '\n';
  out << "epoch,loss,mse,kld,zero_fraction,seconds\n";
  out.precision(10);
  for (const auto& r : epochs) {
    out << r.epoch << ',' << r.loss << ',' << r.mse << ',' << r.kld << ','
        << r.zero_fraction << ',' << r.seconds << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

TrainResult train(std::span<const Vector> dataset, const ModelConfig& model,
                  const TrainConfig& cfg) {
  return train(dataset, init_params(cfg.seed, model, cfg.init_noise), cfg);
}

TrainResult train(std::span<const Vector> dataset, ModelParams initial,
                  const TrainConfig& cfg) {
  cfg.validate();
  initial.validate();
  if (dataset.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "train: empty dataset");
  }
  for (const Vector& x : dataset) {
    if (x.size() != initial.block_size()) {
      throw Error(ErrorKind::kShapeMismatch,
                  "train: block length does not match the model");
    }
  }

  // The tail of the dataset is held out, unshuffled.
  const auto n_val = static_cast<std::size_t>(
      std::floor(cfg.validation_fraction * static_cast<double>(dataset.size())));
  const std::span<const Vector> train_set =
      n_val > 0 ? dataset.first(dataset.size() - n_val) : dataset;
  const std::span<const Vector> val_set =
      n_val > 0 ? dataset.last(n_val) : dataset;

  TrainResult result;
  result.history.beta1 = cfg.beta1;
  result.history.beta2 = cfg.beta2;
  result.history.eps = cfg.eps;
  result.history.weight_decay = cfg.weight_decay;
  result.initial_loss = dataset_loss(train_set, initial, cfg).total;

  ModelParams params = std::move(initial);
  ModelParams best = params;
  double best_val = dataset_loss(val_set, params, cfg).total;
  std::vector<double> best_val_mse_by_epoch;
  bool have_sparse = false;

  AdamWState state = AdamWState::init(params);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Vector> batch;
  batch.reserve(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);

    LossTerms running;
    std::size_t seen = 0;
    EpochRecord rec;
    LossTerms val;
    try {
      for (std::size_t first = 0; first < order.size(); first += cfg.batch_size) {
        batch.clear();
        const std::size_t last = std::min(order.size(), first + cfg.batch_size);
        for (std::size_t i = first; i < last; ++i) batch.push_back(train_set[order[i]]);
        const BatchGradients bg = compute_gradients(batch, params, cfg);
        const double w = static_cast<double>(batch.size());
        running.total += bg.loss.total * w;
        running.mse += bg.loss.mse * w;
        running.kld += bg.loss.kld * w;
        seen += batch.size();
        adamw_step(params, bg.grads, state, cfg);
      }
      val = dataset_loss(val_set, params, cfg);
      rec.zero_fraction = latent_zero_fraction(val_set, params, cfg.theta, cfg.phi);
    } catch (const Error& e) {
      // Blown-up weights surface as overflow or NaN downstream of the update.
      if (e.kind() != ErrorKind::kNonFinite && e.kind() != ErrorKind::kOverflow) throw;
      throw Error(ErrorKind::kDivergence, "training diverged at epoch " +
                                              std::to_string(epoch) + ": " + e.what());
    }
    rec.epoch = epoch;
    rec.loss = running.total / static_cast<double>(seen);
    rec.mse = running.mse / static_cast<double>(seen);
    rec.kld = running.kld / static_cast<double>(seen);
    rec.val_loss = val.total;
    rec.val_mse = val.mse;
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(rec.loss) || !std::isfinite(rec.val_loss)) {
      throw Error(ErrorKind::kDivergence,
                  "training diverged at epoch " + std::to_string(epoch));
    }
    result.history.epochs.push_back(rec);

    // Once the sparsity target has been met, only sparse-enough epochs compete.
    const bool qualifies = rec.zero_fraction >= cfg.xi;
    if (cfg.select_sparse && qualifies && !have_sparse) {
      have_sparse = true;
      best_val = std::numeric_limits<double>::infinity();
    }
    if ((!have_sparse || qualifies) && val.total < best_val) {
      best_val = val.total;
      best = params;
      result.best_epoch = epoch;
    }

    const double best_mse_so_far =
        std::min(rec.val_mse, best_val_mse_by_epoch.empty()
                                  ? std::numeric_limits<double>::infinity()
                                  : best_val_mse_by_epoch.back());
    best_val_mse_by_epoch.push_back(best_mse_so_far);

    bool stop = false;
    if (cfg.stop_rule == StopRule::kZeroFractionBelowXi) {
      stop = rec.zero_fraction < cfg.xi;
    } else if (rec.zero_fraction >= cfg.xi &&
               best_val_mse_by_epoch.size() >
                   static_cast<std::size_t>(cfg.plateau_epochs)) {
      const double earlier =
          best_val_mse_by_epoch[best_val_mse_by_epoch.size() - 1 -
                                static_cast<std::size_t>(cfg.plateau_epochs)];
      stop = best_mse_so_far >= (1.0 - cfg.plateau_tolerance) * earlier;
    }
    if (stop) {
      result.stopped_by_rule = true;
      break;
    }
  }

  result.params = std::move(best);
  result.final_loss = dataset_loss(train_set, result.params, cfg).total;
  return result;
}

}  // namespace asaedct
