#include "radioclass/augment.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "radioclass/dsp.hpp"
#include "radioclass/errors.hpp"
#include "radioclass/rng.hpp"

namespace radioclass {

namespace {

double wrap_phase(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return x - two_pi * std::round(x / two_pi);
}

}  // namespace

AudioClip time_stretch(const AudioClip& clip, double factor) {
  if (!(factor > 0.0)) throw ConfigError("stretch factor must be positive");
  const auto len = static_cast<long long>(clip.samples.size());
  AudioClip out = clip;
  if (len == 0) return out;

  const int n_fft = kFftSize;
  const int hop = kHopSize;
  const auto window = hann_window(n_fft);
  const auto spec = stft(clip.samples, n_fft, hop, window, true);
  const int n_in = spec.n_frames();
  const int n_bins = spec.n_bins();

  const auto out_len =
      static_cast<long long>(std::llround(static_cast<double>(len) / factor));
  const int n_out = 1 + static_cast<int>(out_len / hop);

  // Per-hop phase advance a bin accrues at its nominal center frequency.
  std::vector<double> omega(n_bins);
  for (int k = 0; k < n_bins; ++k)
    omega[k] = 2.0 * std::numbers::pi * k * hop / n_fft;

  ComplexSpectrum stretched;
  stretched.n_fft = n_fft;
  stretched.hop = hop;
  stretched.window = window;
  stretched.centered = true;
  stretched.source_length = static_cast<int>(out_len);
  stretched.frames.assign(n_out,
                          std::vector<std::complex<double>>(n_bins));

  std::vector<double> phase_acc(n_bins);
  for (int k = 0; k < n_bins; ++k) phase_acc[k] = std::arg(spec.frames[0][k]);

  for (int i = 0; i < n_out; ++i) {
    const double t = i * factor;
    auto f0 = static_cast<int>(t);
    if (f0 > n_in - 1) f0 = n_in - 1;
    const int f1 = std::min(f0 + 1, n_in - 1);
    const double frac = t - f0;
    for (int k = 0; k < n_bins; ++k) {
      const double mag = (1.0 - frac) * std::abs(spec.frames[f0][k]) +
                         frac * std::abs(spec.frames[f1][k]);
      stretched.frames[i][k] = std::polar(mag, phase_acc[k]);
      const double dphi = std::arg(spec.frames[f1][k]) -
                          std::arg(spec.frames[f0][k]) - omega[k];
      phase_acc[k] += omega[k] + wrap_phase(dphi);
    }
  }

  out.samples = istft(stretched);
  return out;
}

AudioClip add_noise(const AudioClip& clip, double noise_factor,
                    std::mt19937_64& rng) {
  if (noise_factor < 0.0) throw ConfigError("noise factor must be >= 0");
  AudioClip out = clip;
  for (auto& s : out.samples) s += noise_factor * gaussian(rng);
  return out;
}

AudioClip shift_samples(const AudioClip& clip, long long shift) {
  const auto len = static_cast<long long>(clip.samples.size());
  AudioClip out = clip;
  std::fill(out.samples.begin(), out.samples.end(), 0.0);
  for (long long i = 0; i < len; ++i) {
    const long long src = i - shift;
    if (src >= 0 && src < len) out.samples[i] = clip.samples[src];
  }
  return out;
}

AudioClip time_shift(const AudioClip& clip, double max_frac,
                     std::mt19937_64& rng) {
  if (max_frac < 0.0 || max_frac >= 1.0)
    throw ConfigError("shift fraction must be in [0, 1)");
  const auto len = static_cast<long long>(clip.samples.size());
  const auto bound = static_cast<long long>(max_frac * len);
  if (bound == 0) return clip;
  const auto shift =
      static_cast<long long>(uniform_index(rng, 2 * bound + 1)) - bound;
  return shift_samples(clip, shift);
}

AugmentedSet augment_dataset(const std::vector<AudioClip>& train_set,
                             const AugmentConfig& cfg) {
  AugmentedSet out;
  for (const auto& clip : train_set) {
    out.clips.push_back(clip);
    out.source_ids.push_back(clip.id);
    const uint64_t clip_seed = cfg.seed ^ fnv1a64(clip.id);

    if (cfg.stretch_enabled) {
      AudioClip copy = time_stretch(clip, cfg.stretch_factor);
      copy.samples.resize(clip.samples.size(), 0.0);
      copy.id = clip.id + "_stretch";
      out.clips.push_back(std::move(copy));
      out.source_ids.push_back(clip.id);
    }
    if (cfg.noise_enabled) {
      auto rng = make_rng(clip_seed, "augment/noise");
      AudioClip copy = add_noise(clip, cfg.noise_factor, rng);
      copy.id = clip.id + "_noise";
      out.clips.push_back(std::move(copy));
      out.source_ids.push_back(clip.id);
    }
    if (cfg.shift_enabled) {
      auto rng = make_rng(clip_seed, "augment/shift");
      AudioClip copy = time_shift(clip, cfg.max_shift_frac, rng);
      copy.id = clip.id + "_shift";
      out.clips.push_back(std::move(copy));
      out.source_ids.push_back(clip.id);
    }
  }
  return out;
}

}  // namespace radioclass
