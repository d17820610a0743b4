// Microbenchmarks for the hot paths: transforms, features, metrics, and
// the CNN forward pass. Inputs are synthesized once per benchmark and
// reused across iterations.

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "radioclass/cnn.hpp"
#include "radioclass/datagen.hpp"
#include "radioclass/denoise.hpp"
#include "radioclass/dsp.hpp"
#include "radioclass/eval.hpp"
#include "radioclass/rng.hpp"
#include "radioclass/spectral.hpp"
#include "radioclass/textual.hpp"
#include "radioclass/types.hpp"

using namespace radioclass;

namespace {

std::vector<double> bench_signal(int n, uint64_t seed) {
  auto rng = make_rng(seed, "bench/signal");
  std::vector<double> s(n);
  for (auto& v : s) v = 0.8 * (uniform_unit(rng) * 2.0 - 1.0);
  return s;
}

AudioClip bench_clip(uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  return synthesize_clip(Label::Landing, "bench", spec).first;
}

void bm_fft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto signal = bench_signal(n, 1);
  Fft fft(n);
  std::vector<double> in(signal);
  for (auto _ : state) {
    auto bins = fft.forward_real(in);
    benchmark::DoNotOptimize(bins);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void bm_stft_clip(benchmark::State& state) {
  const auto signal = bench_signal(kCanonicalSamples, 2);
  const auto window = hann_window(kFftSize);
  for (auto _ : state) {
    auto spec = stft(signal, kFftSize, kHopSize, window, true);
    benchmark::DoNotOptimize(spec);
  }
}

void bm_denoise_clip(benchmark::State& state) {
  const auto clip = bench_clip(3);
  for (auto _ : state) {
    auto cleaned = denoise(clip);
    benchmark::DoNotOptimize(cleaned);
  }
}

void bm_mel_pipeline(benchmark::State& state) {
  const auto clip = bench_clip(4);
  for (auto _ : state) {
    auto gram = spectral_pipeline(clip, SpectralVariant::LogMel);
    benchmark::DoNotOptimize(gram);
  }
}

void bm_pool_spectrogram(benchmark::State& state) {
  const auto gram = spectral_pipeline(bench_clip(5), SpectralVariant::LogMel);
  for (auto _ : state) {
    auto pooled = pool_spectrogram(gram);
    benchmark::DoNotOptimize(pooled);
  }
}

void bm_tfidf_transform(benchmark::State& state) {
  SynthSpec spec;
  std::vector<Transcript> docs;
  for (int i = 0; i < 64; ++i) {
    spec.seed = 100 + i;
    const auto [clip, text] = synthesize_clip(
        i % 2 == 0 ? Label::Landing : Label::Takeoff,
        "d" + std::to_string(i), spec);
    docs.push_back(make_transcript(clip.id, text));
  }
  const auto model = fit_tfidf(docs);
  size_t next = 0;
  for (auto _ : state) {
    auto vec = transform_tfidf(docs[next++ % docs.size()], model);
    benchmark::DoNotOptimize(vec);
  }
}

void bm_auroc(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto rng = make_rng(6, "bench/auroc");
  std::vector<int> labels(n);
  std::vector<double> scores(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = i % 2;
    scores[i] = uniform_unit(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(auroc(labels, scores));
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void bm_cnn_forward(benchmark::State& state) {
  CnnSpec spec;
  const auto params = init_cnn_params(spec, 7);
  const auto gram = spectral_pipeline(bench_clip(8), SpectralVariant::LogMel);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cnn_forward(params, gram));
  }
}

BENCHMARK(bm_fft)->Arg(512)->Arg(2048)->Arg(8192);
BENCHMARK(bm_stft_clip)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_denoise_clip)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mel_pipeline)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_pool_spectrogram);
BENCHMARK(bm_tfidf_transform);
BENCHMARK(bm_auroc)->Arg(100)->Arg(2000);
BENCHMARK(bm_cnn_forward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
