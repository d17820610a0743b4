#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "radioclass/types.hpp"

namespace radioclass {

struct AugmentConfig {
  double stretch_factor = 1.1;
  double noise_factor = 0.005;
  double max_shift_frac = 0.10;
  uint64_t seed = 42;
  bool stretch_enabled = true;
  bool noise_enabled = true;
  bool shift_enabled = true;
};

/// Phase-vocoder time stretch: duration becomes len/factor, pitch is
/// preserved. Caller restores canonical duration afterwards.
AudioClip time_stretch(const AudioClip& clip, double factor);

/// out[i] = in[i] + noise_factor * g_i, g_i i.i.d. standard normal.
AudioClip add_noise(const AudioClip& clip, double noise_factor,
                    std::mt19937_64& rng);

/// Rotate by a shift drawn uniformly from [-max_frac*len, +max_frac*len];
/// vacated samples are zero-filled, nothing wraps around.
AudioClip time_shift(const AudioClip& clip, double max_frac,
                     std::mt19937_64& rng);

/// time_shift with the shift fixed; positive moves content later.
AudioClip shift_samples(const AudioClip& clip, long long shift);

// Original clips interleaved with their augmented copies; source_ids[i]
// names the clip clips[i] was derived from (itself for originals), which is
// how augmented copies inherit transcripts.
struct AugmentedSet {
  std::vector<AudioClip> clips;
  std::vector<std::string> source_ids;
};

/// Emit each training clip plus one copy per enabled technique (labels
/// copied, duration restored to the source length). Per-clip RNG streams
/// are derived from seed ^ fnv1a64(clip id), so output is independent of
/// clip order.
AugmentedSet augment_dataset(const std::vector<AudioClip>& train_set,
                             const AugmentConfig& cfg);

}  // namespace radioclass
