// End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per criterion
// and exits nonzero if any criterion fails.
//
//   acceptance            run every criterion
//   acceptance 3 6        run only the listed criteria

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "asaedct/codec.hpp"
#include "asaedct/data.hpp"
#include "asaedct/metrics.hpp"
#include "asaedct/pipeline.hpp"
#include "asaedct/training.hpp"
#include "oracles/oracles.hpp"

using namespace asaedct;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  enum { kPass, kFail, kSkip } status;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)};
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// Shared corpus for the training criteria: 1000 training blocks and a
// separate 100-block test recording, both from fixed seeds.
constexpr std::uint64_t kTrainCorpusSeed = 1;
constexpr std::uint64_t kTestCorpusSeed = 99;
constexpr std::size_t kTrainBlocks = 1000;
constexpr std::size_t kTestBlocks = 100;

const Recording& train_corpus() {
  static const Recording r = synthetic_recording(kTrainCorpusSeed, kTrainBlocks);
  return r;
}

const Recording& test_corpus() {
  static const Recording r = synthetic_recording(kTestCorpusSeed, kTestBlocks);
  return r;
}

struct Trained {
  TrainResult result;
  double seconds = 0.0;
};

// The full model at default settings, trained once and shared.
const Trained& full_model() {
  static const Trained t = [] {
    TrainConfig cfg;
    cfg.seed = 0;
    cfg.max_epochs = 200;
    const auto t0 = Clock::now();
    Trained out{train_on_recording(train_corpus(), ModelConfig{}, cfg), 0.0};
    out.seconds = seconds_since(t0);
    return out;
  }();
  return t;
}

// 1. DCT round trip and Parseval.
Outcome dct_identity() {
  std::mt19937_64 rng(101);
  std::vector<Vector> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back(oracle::random_vector(rng, 64, 10.0));
  const Dct3 d(64);
  double worst_rt = 0.0, worst_energy = 0.0;
  const auto t0 = Clock::now();
  for (const Vector& x : xs) {
    const Vector c = d.forward(x);
    worst_rt = std::max(worst_rt, (d.inverse(c) - x).lpNorm<Eigen::Infinity>());
    worst_energy = std::max(worst_energy, std::abs(c.norm() - x.norm()));
  }
  const double secs = seconds_since(t0);
  return verdict(worst_rt < 1e-10 && worst_energy < 1e-10 && secs < 1.0,
                 fmt("round trip %.1e, Parseval %.1e, %.3f s", worst_rt, worst_energy, secs));
}

// 2. Convolution theorem against brute-force symmetric convolution.
Outcome convolution_theorem() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int trials = 0;
  for (Index n : {4, 8, 16}) {
    const FgVectors fg = FgVectors::make(n);
    for (int t = 0; t < 200; ++t, ++trials) {
      const Vector x = oracle::random_vector(rng, n);
      const Vector w = oracle::random_vector(rng, n);
      const Vector diff =
          symmetric_convolve_via_dct(x, w, fg) - oracle::brute_symmetric_convolve(x, w);
      worst = std::max(worst, diff.lpNorm<Eigen::Infinity>());
    }
  }
  return verdict(worst < 1e-8, fmt("%d trials, max error %.1e", trials, worst));
}

// 3. Gradient suite.
Outcome gradient_suite() {
  constexpr int kPoints = 100;
  std::mt19937_64 rng(303);
  std::map<std::string, double> worst;
  bool surrogate_exact = true;

  const auto fd = [](const std::function<double(const Vector&)>& f, const Vector& x, Index i) {
    return oracle::central_difference(f, x, i);
  };
  const auto record = [&worst](const std::string& name, double analytic, double numeric) {
    worst[name] = std::max(worst[name], oracle::relative_error(analytic, numeric));
  };

  // Layer level.
  std::uniform_real_distribution<double> ux(-2.0, 2.0), ut(0.0, 1.0);
  for (int p = 0; p < kPoints; ++p) {
    const Index n = 8;
    Vector x(n), t(n);
    for (Index k = 0; k < n; ++k) {
      do {
        x[k] = ux(rng);
        t[k] = ut(rng);
      } while (std::abs(std::abs(x[k]) - t[k]) <= 1e-2);
    }
    const Vector g = oracle::random_vector(rng, n);
    const Index k = p % n;
    const ThresholdGrad tg = threshold_backward(x, t, g);
    record("soft_threshold dx", tg.dx[k], fd([&](const Vector& v) { return g.dot(soft_threshold(v, t)); }, x, k));
    record("soft_threshold dT", tg.dt[k], fd([&](const Vector& v) { return g.dot(soft_threshold(x, v)); }, t, k));
    record("hard_threshold dx", tg.dx[k], fd([&](const Vector& v) { return g.dot(hard_threshold(v, t)); }, x, k));
    for (Index j = 0; j < n; ++j) {
      const double want = std::abs(x[j]) > t[j] ? -sign(x[j]) * g[j] : 0.0;
      surrogate_exact = surrogate_exact && tg.dt[j] == want;
    }

    const Vector v = oracle::random_vector(rng, n);
    const ScaleGrad sg = scale_backward(x, v, g);
    record("scale dx", sg.dx[k], fd([&](const Vector& a) { return g.dot(scale(a, v)); }, x, k));
    record("scale dV", sg.dv[k], fd([&](const Vector& a) { return g.dot(scale(x, a)); }, v, k));

    const LinearLayer lin{Matrix::NullaryExpr(n, n, [&] { return ux(rng); }), oracle::random_vector(rng, n)};
    const LinearGrad lg = linear_backward(x, lin, g);
    record("linear dx", lg.dx[k], fd([&](const Vector& a) { return g.dot(linear_forward(a, lin)); }, x, k));
    record("linear db", lg.dbias[k], fd([&](const Vector& b) { return g.dot(linear_forward(x, LinearLayer{lin.weight, b})); }, lin.bias, k));
    const Index wi = static_cast<Index>(rng() % static_cast<std::uint64_t>(n * n));
    const Vector wflat = lin.weight.reshaped();
    record("linear dW", lg.dweight.reshaped()[wi],
           fd([&](const Vector& f) { return g.dot(linear_forward(x, LinearLayer{f.reshaped(n, n), lin.bias})); }, wflat, wi));

    const Matrix r = Matrix::NullaryExpr(3, n, [&] { return ux(rng); });
    const ChannelMixer mix{oracle::random_vector(rng, 3)};
    const MixGrad mg = channel_mix_backward(r, mix, g);
    record("mixer dweights", mg.dweights[p % 3], fd([&](const Vector& m) { return g.dot(channel_mix(r, ChannelMixer{m})); }, mix.weights, p % 3));
    const Index ri = static_cast<Index>(rng() % static_cast<std::uint64_t>(3 * n));
    const Vector rflat = r.reshaped();
    record("mixer dR", mg.dr.reshaped()[ri], fd([&](const Vector& f) { return g.dot(channel_mix(f.reshaped(3, n), mix)); }, rflat, ri));
  }

  // Full loss, every parameter group, soft and hard models. Hard thresholds
  // are covered by the exact surrogate check above.
  for (ThresholdKind kind : {ThresholdKind::kSoft, ThresholdKind::kHard}) {
    const std::string tag = kind == ThresholdKind::kSoft ? "soft " : "hard ";
    ModelConfig mc;
    mc.block_size = 16;
    mc.threshold = kind;
    TrainConfig cfg;
    for (int p = 0; p < kPoints; ++p) {
      ModelParams params = oracle::random_params(1000 + static_cast<std::uint64_t>(p), mc);
      std::vector<Vector> batch;
      while (batch.size() < 2) {
        const Vector x = oracle::random_vector(rng, mc.block_size);
        if (oracle::kink_margin(params, x) > 1e-2) batch.push_back(x);
      }
      const BatchGradients bg = compute_gradients(batch, params, cfg);
      ModelParams grads = bg.grads;
      const auto loss = [&] {
        double acc = 0.0;
        for (const Vector& x : batch) {
          const ForwardResult f = forward_autoencoder(x, params);
          acc += total_loss(x, f.output, f.latent, cfg);
        }
        return acc / static_cast<double>(batch.size());
      };
      auto pg = oracle::param_groups(params);
      auto gg = oracle::param_groups(grads);
      for (std::size_t k = 0; k < pg.size(); ++k) {
        if (pg[k].is_threshold && kind == ThresholdKind::kHard) continue;
        std::string name = pg[k].name;
        if (const auto b = name.find('['); b != std::string::npos) name = name.substr(0, b);
        const std::size_t i = static_cast<std::size_t>(rng() % pg[k].size);
        const double orig = pg[k].data[i];
        pg[k].data[i] = orig + 1e-5;
        const double up = loss();
        pg[k].data[i] = orig - 1e-5;
        const double down = loss();
        pg[k].data[i] = orig;
        record(tag + "loss d" + name, gg[k].data[i], (up - down) / 2e-5);
      }
    }
  }

  double overall = 0.0;
  std::string worst_name;
  for (const auto& [name, err] : worst) {
    if (err > overall) {
      overall = err;
      worst_name = name;
    }
  }
  return verdict(overall < 1e-4 && surrogate_exact,
                 fmt("%zu groups x %d points, worst rel. error %.1e (%s), hard dT surrogate %s",
                     worst.size(), kPoints, overall, worst_name.c_str(),
                     surrogate_exact ? "exact" : "MISMATCH"));
}

// 4. Codec losslessness and the dequantization bound.
Outcome codec_lossless() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> len(0, 200);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::int32_t> small(-500, 500);
  std::uniform_int_distribution<std::int32_t> any(std::numeric_limits<std::int32_t>::min(),
                                                  std::numeric_limits<std::int32_t>::max());
  int failures = 0;
  const auto t0 = Clock::now();
  for (int t = 0; t < 100000; ++t) {
    const double density = u(rng);
    std::vector<std::int32_t> q(static_cast<std::size_t>(len(rng)));
    for (auto& v : q) {
      if (u(rng) < density) v = u(rng) < 0.02 ? any(rng) : small(rng);
    }
    const auto packed = xz_compress(rle_encode(q), kDefaultLzmaPreset);
    failures += rle_decode(xz_decompress(packed)) != q;
  }
  const double secs = seconds_since(t0);

  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vector y = oracle::random_vector(rng, 64, 5.0);
    worst = std::max(worst, (dequantize(quantize(y, 4, 5), 4, 5) - y).lpNorm<Eigen::Infinity>());
  }
  return verdict(failures == 0 && worst <= 2.5e-4,
                 fmt("100000 sequences, %d mismatches (%.1f s); dequantization error %.3e",
                     failures, secs, worst));
}

// 5. Quality score reproduces the published rows.
Outcome metric_consistency() {
  const double a = quality_score(25.66, 5.09);
  const double b = quality_score(8.40, 5.89);
  return verdict(std::abs(a - 5.05) <= 0.01 && std::abs(b - 1.42) <= 0.01,
                 fmt("25.66/5.09 = %.4f (5.05), 8.40/5.89 = %.4f (1.42)", a, b));
}

// 6. End-to-end training.
Outcome end_to_end() {
  const Trained& t = full_model();
  const RoundTripResult rt = roundtrip(test_corpus(), t.result.params);
  const double drop = t.result.initial_loss / t.result.final_loss;
  const bool ok = drop >= 10.0 && rt.metrics.prd < 10.0 &&
                  rt.compressed.zero_fraction >= 0.5 && t.seconds < 300.0;
  return verdict(ok, fmt("%zu epochs in %.1f s, loss %.4g -> %.4g (%.0fx), test PRD %.2f%%, "
                         "zero fraction %.3f, CR %.2f",
                         t.result.history.epochs.size(), t.seconds, t.result.initial_loss,
                         t.result.final_loss, drop, rt.metrics.prd,
                         rt.compressed.zero_fraction, rt.metrics.cr));
}

// 7. Ablation ordering over three seeds.
Outcome ablation_ordering() {
  const auto variants = ablation_variants(ModelConfig{}, TrainConfig{});
  const auto find = [&](const std::string& name) {
    return *std::find_if(variants.begin(), variants.end(),
                         [&](const AblationVariant& v) { return v.name == name; });
  };
  double full = 0.0, dct = 0.0, soft = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (auto [name, sum] : {std::pair{"ASAEDCT (C=3)", &full}, std::pair{"Only DCT", &dct},
                             std::pair{"With soft-threshold", &soft}}) {
      AblationVariant v = find(name);
      v.train.seed = seed;
      *sum += run_ablation_variant(v, train_corpus(), test_corpus()).metrics.qs / 3.0;
    }
  }
  return verdict(full > dct && full > soft,
                 fmt("mean QS full %.3f, DCT-only %.3f, soft-threshold %.3f", full, dct, soft));
}

// 8. Bonn set S, when present.
Outcome bonn_set_s() {
  const char* env = std::getenv("ASAEDCT_BONN_S");
  const fs::path dir = env ? fs::path(env) : fs::path("data/bonn/S");
  if (!fs::is_directory(dir)) {
    return {Outcome::kSkip, "set S not found (set ASAEDCT_BONN_S to its directory)"};
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) return {Outcome::kSkip, "set S directory is empty"};
  const ModelParams& model = full_model().result.params;
  double prd_sum = 0.0, cr_sum = 0.0;
  for (const auto& f : files) {
    const Recording r = load_recording(f.string(), InputFormat::kAsciiLines);
    const RoundTripResult rt = roundtrip(r, model);
    prd_sum += rt.metrics.prd;
    cr_sum += rt.metrics.cr;
  }
  const double n = static_cast<double>(files.size());
  return verdict(prd_sum / n < 15.0 && cr_sum / n > 4.0,
                 fmt("%zu records, mean PRD %.2f%%, mean CR %.2f", files.size(), prd_sum / n,
                     cr_sum / n));
}

// 9. Encoding 640 samples.
Outcome encode_throughput() {
  const ModelParams& model = full_model().result.params;
  Recording r = synthetic_recording(909, 10);
  double worst = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = Clock::now();
    const CompressResult c = compress_recording(r, model);
    worst = std::max(worst, seconds_since(t0));
    if (c.stream.empty()) return verdict(false, "empty stream");
  }
  return verdict(worst < 0.1, fmt("640 samples, slowest of 5 runs %.2e s", worst));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"DCT round trip and Parseval", dct_identity},
      {"convolution theorem", convolution_theorem},
      {"gradient suite", gradient_suite},
      {"codec losslessness", codec_lossless},
      {"metric consistency", metric_consistency},
      {"end-to-end training", end_to_end},
      {"ablation ordering", ablation_ordering},
      {"Bonn set S envelope", bonn_set_s},
      {"encode throughput", encode_throughput},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }

  int failed = 0, skipped = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::printf("criterion %d: unknown\n", id);
      ++failed;
      continue;
    }
    const auto& [name, run] = criteria[static_cast<std::size_t>(id - 1)];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Outcome::kFail, std::string("threw: ") + e.what()};
    }
    const char* tag = o.status == Outcome::kPass ? "PASS" : o.status == Outcome::kFail ? "FAIL" : "SKIP";
    std::printf("criterion %d %s: %s (%s)\n", id, tag, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.status == Outcome::kFail;
    skipped += o.status == Outcome::kSkip;
  }
  if (failed > 0) return 1;
  // 77 tells ctest the run was skipped when nothing else was checked.
  return skipped == static_cast<int>(selected.size()) ? 77 : 0;
}
