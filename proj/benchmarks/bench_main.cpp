#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "asaedct/codec.hpp"
#include "asaedct/data.hpp"
#include "asaedct/dct.hpp"
#include "asaedct/model.hpp"
#include "asaedct/pipeline.hpp"
#include "asaedct/training.hpp"

using namespace asaedct;

namespace {

Vector random_block(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void BM_Dct3Forward(benchmark::State& state) {
  const Vector x = random_block(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(dct3_forward(x));
}
BENCHMARK(BM_Dct3Forward)->Arg(16)->Arg(64)->Arg(256);

void BM_EncodeBlock(benchmark::State& state) {
  ModelConfig cfg;
  cfg.channels = state.range(0);
  const ModelParams p = init_params(0, cfg);
  const Vector x = random_block(cfg.block_size, 2);
  for (auto _ : state) benchmark::DoNotOptimize(encode_block(x, p));
}
BENCHMARK(BM_EncodeBlock)->Arg(1)->Arg(3)->Arg(4);

void BM_DecodeBlock(benchmark::State& state) {
  const ModelParams p = init_params(0, ModelConfig{});
  const Vector y = encode_block(random_block(64, 3), p);
  for (auto _ : state) benchmark::DoNotOptimize(decode_block(y, p));
}
BENCHMARK(BM_DecodeBlock);

void BM_ComputeGradients(benchmark::State& state) {
  const ModelParams p = init_params(0, ModelConfig{});
  std::vector<Vector> batch;
  for (int i = 0; i < 16; ++i) batch.push_back(random_block(64, 10 + i));
  const TrainConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(compute_gradients(batch, p, cfg));
}
BENCHMARK(BM_ComputeGradients);

void BM_RleEncode(benchmark::State& state) {
  const ModelParams p = init_params(0, ModelConfig{});
  const QuantizedBlock q = quantize(encode_block(random_block(64, 4), p), 4, 5);
  for (auto _ : state) benchmark::DoNotOptimize(rle_encode(q));
}
BENCHMARK(BM_RleEncode);

// 640 samples is 6.4 s of signal at 100 Hz.
void BM_CompressRecording640(benchmark::State& state) {
  const ModelParams p = init_params(0, ModelConfig{});
  const Recording r = synthetic_recording(5, 10);
  for (auto _ : state) benchmark::DoNotOptimize(compress_recording(r, p));
}
BENCHMARK(BM_CompressRecording640)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
