#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "radioclass/types.hpp"

namespace radioclass {

/// HTK mel scale: mel(f) = 2595*log10(1 + f/700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular mel filters sampled on FFT bins; weights[m][k], peak 1 per row.
struct MelFilterBank {
  std::vector<std::vector<double>> weights;
  double fmin = 0.0;
  double fmax = 0.0;
  int sample_rate = 0;
  int n_fft = 0;

  int n_mels() const { return static_cast<int>(weights.size()); }
  int n_bins() const {
    return weights.empty() ? 0 : static_cast<int>(weights[0].size());
  }
  /// Frequency of the m-th filter peak (the middle breakpoint).
  double center_frequency(int m) const;
};

MelFilterBank build_mel_filterbank(int n_mels, int n_fft, int sample_rate,
                                   double fmin, double fmax);

/// Shared 128-band bank for the canonical 2048/22050 configuration.
const MelFilterBank& default_filterbank();

struct Spectrogram {
  enum class Scale { Power, Db, Normalized };

  std::vector<std::vector<double>> values;  // [mel band][frame]
  Scale scale = Scale::Power;
  std::string clip_id;

  int rows() const { return static_cast<int>(values.size()); }
  int cols() const {
    return values.empty() ? 0 : static_cast<int>(values[0].size());
  }
};

enum class SpectralVariant { Mel, LogMel };
std::string to_string(SpectralVariant v);
SpectralVariant parse_spectral_variant(const std::string& text);

/// Power mel spectrogram S[m][n] = sum_k |X(k,n)|^2 * H_m(k), time axis
/// zero-padded/truncated to exactly kSpectrogramFrames columns.
Spectrogram mel_spectrogram(const AudioClip& clip, const MelFilterBank& bank,
                            int n_fft, int hop);

/// 10*log10(S + eps) elementwise.
Spectrogram power_to_db(const Spectrogram& spec, double eps = 1e-10);

/// Affine map onto [0,1]; constant input maps to all zeros.
Spectrogram normalize_minmax(const Spectrogram& spec);

/// canonicalize -> mel power -> (optional dB) -> min-max normalize.
/// Always 128 x 130 in [0,1].
Spectrogram spectral_pipeline(const AudioClip& clip, SpectralVariant variant);

/// Per-band mean (128) then per-band standard deviation (128) over time.
FeatureVector pool_spectrogram(const Spectrogram& spec);

/// Row-major flatten, the CNN input layout.
FeatureVector flatten_spectrogram(const Spectrogram& spec);

// Feature cache: "MELS" magic, u16 version, u16 rows, u16 cols, u8 scale,
// then row-major little-endian f32.
void write_mels_file(const std::filesystem::path& path,
                     const Spectrogram& spec);
Spectrogram read_mels_file(const std::filesystem::path& path);

}  // namespace radioclass
