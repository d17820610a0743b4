#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "radioclass/types.hpp"

namespace radioclass {

// Synthesis knobs. Classes are separable by construction: landing clips
// carry a descending low-band tone motif, takeoff clips an ascending
// high-band one, over a pink-noise bed.
struct SynthSpec {
  int n_clips = 200;
  double class_balance = 0.5;  // landing fraction
  uint64_t seed = 42;
  double noise_level = 0.05;
  double motif_level = 0.35;
  int sample_rate = kCanonicalRate;
  double duration = kClipSeconds;
};

/// 1/f noise (Voss-McCartney), normalized to unit RMS.
std::vector<double> pink_noise(size_t n, std::mt19937_64& rng);

/// One clip plus its transcript, fully determined by (spec, label, id).
std::pair<AudioClip, std::string> synthesize_clip(Label label,
                                                  const std::string& id,
                                                  const SynthSpec& spec);

/// Write n_clips WAVs with transcript sidecars and labels.csv into out_dir.
/// Same spec -> byte-identical corpus. Throws IoError / ConfigError.
void generate_corpus(const SynthSpec& spec,
                     const std::filesystem::path& out_dir);

}  // namespace radioclass
