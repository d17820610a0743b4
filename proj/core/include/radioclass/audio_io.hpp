#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "radioclass/types.hpp"

namespace radioclass {

// Decoded WAV payload before the mono collapse; one vector per channel.
struct MultiChannelAudio {
  std::vector<std::vector<double>> channels;
  int sample_rate = 0;
};

/// Decode a PCM RIFF/WAVE file (8/16/24/32-bit int or 32-bit float,
/// 1-2 channels). Throws MalformedWav / UnsupportedEncoding.
MultiChannelAudio read_wav(const std::filesystem::path& path);
MultiChannelAudio decode_wav(std::span<const uint8_t> bytes);

/// Collapse channels by arithmetic mean. Mono input passes through.
AudioClip to_mono(const MultiChannelAudio& raw);
AudioClip to_mono(const AudioClip& clip);  // identity

/// read_wav + to_mono; clip id defaults to the file stem.
AudioClip load_wav(const std::filesystem::path& path);

/// Band-limited resampling (Hann-windowed sinc, 32 taps per side).
/// Output length is round(len * target/source); equal rates pass through
/// bit-identically.
AudioClip resample(const AudioClip& clip, int target_rate);

/// Force an exact duration: zero-pad or truncate at the clip end.
AudioClip fix_duration(const AudioClip& clip, double seconds);

/// resample to 22,050 Hz then fix at 3 s: the canonical feature contract.
AudioClip canonicalize(const AudioClip& clip);

/// Encode as 16-bit PCM mono WAV.
std::vector<uint8_t> encode_wav16(const AudioClip& clip);
std::vector<uint8_t> encode_wav16(
    const std::vector<std::vector<double>>& channels, int sample_rate);
void write_wav16(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace radioclass
