#pragma once

#include "radioclass/dsp.hpp"
#include "radioclass/types.hpp"

namespace radioclass {

// Per-bin noise magnitude estimate |N(f)| averaged over leading frames.
struct NoiseProfile {
  std::vector<double> magnitudes;
  int frames_used = 0;
};

struct DenoiseConfig {
  int noise_frames = 5;   // leading frames assumed noise-only (~116 ms)
  int smooth_width = 3;   // boxcar width, odd
  int n_fft = kFftSize;
  int hop = kHopSize;
};

/// Mean magnitude of the first T frames, per bin.
NoiseProfile estimate_noise_profile(const ComplexSpectrum& spec, int noise_frames);

/// Magnitude subtraction clamped at zero; phase carried over unchanged.
ComplexSpectrum spectral_subtract(const ComplexSpectrum& spec,
                                  const NoiseProfile& profile);

/// Boxcar moving average of magnitudes across frames, boundary-truncated;
/// phases untouched. width must be odd.
ComplexSpectrum smooth_magnitudes(const ComplexSpectrum& spec, int width);

/// Full chain: stft -> noise profile -> subtract -> smooth -> istft with
/// the original phases. Output length equals input length.
AudioClip denoise(const AudioClip& clip, const DenoiseConfig& cfg = {});

}  // namespace radioclass
