#pragma once

#include <optional>
#include <string>
#include <vector>

namespace radioclass {

// Canonical clip contract: 22,050 Hz mono, exactly 3 seconds.
inline constexpr int kCanonicalRate = 22050;
inline constexpr double kClipSeconds = 3.0;
inline constexpr int kCanonicalSamples = 66150;

// Feature contract for the spectral pipeline: 128 mel bands x 130 frames.
inline constexpr int kMelBands = 128;
inline constexpr int kSpectrogramFrames = 130;
inline constexpr int kFftSize = 2048;
inline constexpr int kHopSize = 512;

enum class Label : int { Landing = 0, Takeoff = 1 };

std::string to_string(Label label);
std::optional<Label> parse_label(const std::string& text);

// Mono waveform with amplitudes in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::optional<Label> label;
  std::string id;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
  bool is_canonical() const {
    return sample_rate == kCanonicalRate &&
           samples.size() == static_cast<size_t>(kCanonicalSamples);
  }
};

using FeatureVector = std::vector<double>;

}  // namespace radioclass
