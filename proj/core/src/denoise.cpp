#include "radioclass/denoise.hpp"

#include <cmath>

#include "radioclass/errors.hpp"

namespace radioclass {

NoiseProfile estimate_noise_profile(const ComplexSpectrum& spec,
                                    int noise_frames) {
  if (noise_frames < 1 || noise_frames > spec.n_frames()) {
    throw TooFewFrames("need 1 <= T <= n_frames, got T=" +
                       std::to_string(noise_frames) + " with " +
                       std::to_string(spec.n_frames()) + " frames");
  }
  NoiseProfile profile;
  profile.frames_used = noise_frames;
  profile.magnitudes.assign(spec.n_bins(), 0.0);
  for (int t = 0; t < noise_frames; ++t) {
    for (int f = 0; f < spec.n_bins(); ++f) {
      profile.magnitudes[f] += std::abs(spec.frames[t][f]);
    }
  }
  for (double& m : profile.magnitudes) m /= noise_frames;
  return profile;
}

ComplexSpectrum spectral_subtract(const ComplexSpectrum& spec,
                                  const NoiseProfile& profile) {
  if (static_cast<int>(profile.magnitudes.size()) != spec.n_bins()) {
    throw DimensionMismatch("noise profile has " +
                            std::to_string(profile.magnitudes.size()) +
                            " bins, spectrum has " +
                            std::to_string(spec.n_bins()));
  }
  ComplexSpectrum out = spec;
  for (auto& frame : out.frames) {
    for (int f = 0; f < spec.n_bins(); ++f) {
      const double mag = std::abs(frame[f]);
      const double clean = std::max(mag - profile.magnitudes[f], 0.0);
      if (mag > 0.0) {
        frame[f] *= clean / mag;  // scales magnitude, direction untouched
      } else {
        frame[f] = 0.0;
      }
    }
  }
  return out;
}

ComplexSpectrum smooth_magnitudes(const ComplexSpectrum& spec, int width) {
  if (width < 1 || width % 2 == 0) {
    throw EvenWidth("smoothing width must be odd and >= 1, got " +
                    std::to_string(width));
  }
  if (width == 1) return spec;

  const int n_frames = spec.n_frames();
  const int n_bins = spec.n_bins();
  const int half = width / 2;

  std::vector<std::vector<double>> mags(n_frames, std::vector<double>(n_bins));
  for (int t = 0; t < n_frames; ++t) {
    for (int f = 0; f < n_bins; ++f) mags[t][f] = std::abs(spec.frames[t][f]);
  }

  ComplexSpectrum out = spec;
  for (int t = 0; t < n_frames; ++t) {
    const int lo = std::max(0, t - half);
    const int hi = std::min(n_frames - 1, t + half);
    for (int f = 0; f < n_bins; ++f) {
      double acc = 0.0;
      for (int u = lo; u <= hi; ++u) acc += mags[u][f];
      const double smoothed = acc / (hi - lo + 1);
      const double mag = mags[t][f];
      if (mag > 0.0) {
        out.frames[t][f] = spec.frames[t][f] * (smoothed / mag);
      } else {
        out.frames[t][f] = {smoothed, 0.0};
      }
    }
  }
  return out;
}

AudioClip denoise(const AudioClip& clip, const DenoiseConfig& cfg) {
  const std::vector<double> window = hann_window(cfg.n_fft);
  const ComplexSpectrum spec =
      stft(clip.samples, cfg.n_fft, cfg.hop, window, /*centered=*/true);
  const NoiseProfile profile = estimate_noise_profile(spec, cfg.noise_frames);
  const ComplexSpectrum subtracted = spectral_subtract(spec, profile);
  const ComplexSpectrum smoothed =
      smooth_magnitudes(subtracted, cfg.smooth_width);

  AudioClip out = clip;
  out.samples = istft(smoothed);
  return out;
}

}  // namespace radioclass
