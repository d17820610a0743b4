#include "radioclass/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "radioclass/errors.hpp"

namespace radioclass {

namespace {

uint32_t read_u32(std::span<const uint8_t> b, size_t off) {
  return static_cast<uint32_t>(b[off]) | (static_cast<uint32_t>(b[off + 1]) << 8) |
         (static_cast<uint32_t>(b[off + 2]) << 16) |
         (static_cast<uint32_t>(b[off + 3]) << 24);
}

uint16_t read_u16(std::span<const uint8_t> b, size_t off) {
  return static_cast<uint16_t>(b[off] | (b[off + 1] << 8));
}

void append_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void append_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

void append_tag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

double decode_sample(std::span<const uint8_t> data, size_t off,
                     uint16_t format, uint16_t bits) {
  if (format == 3) {  // IEEE float
    uint32_t raw = read_u32(data, off);
    float f;
    std::memcpy(&f, &raw, 4);
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (bits) {
    case 8:  // unsigned
      return (static_cast<int>(data[off]) - 128) / 128.0;
    case 16: {
      int16_t v = static_cast<int16_t>(read_u16(data, off));
      return v / 32768.0;
    }
    case 24: {
      int32_t v = data[off] | (data[off + 1] << 8) | (data[off + 2] << 16);
      if (v & 0x800000) v |= ~0xffffff;  // sign extend
      return v / 8388608.0;
    }
    case 32: {
      int32_t v = static_cast<int32_t>(read_u32(data, off));
      return v / 2147483648.0;
    }
    default:
      throw UnsupportedEncoding("unsupported PCM bit depth " +
                                std::to_string(bits));
  }
}

}  // namespace

MultiChannelAudio decode_wav(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw MalformedWav("missing RIFF/WAVE header");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  std::span<const uint8_t> data;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* tag = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t chunk_size = read_u32(bytes, pos + 4);
    const size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw MalformedWav("chunk '" + std::string(tag, 4) +
                         "' extends past end of file");
    }
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw MalformedWav("fmt chunk too small");
      format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      sample_rate = read_u32(bytes, body + 4);
      bits = read_u16(bytes, body + 14);
      if (format == 0xfffe && chunk_size >= 40) {
        format = read_u16(bytes, body + 24);  // WAVE_FORMAT_EXTENSIBLE
      }
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data = bytes.subspan(body, chunk_size);
      break;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw MalformedWav("missing fmt chunk");
  if (data.empty() && data.data() == nullptr) {
    throw MalformedWav("missing data chunk");
  }
  if (format != 1 && format != 3) {
    throw UnsupportedEncoding("compressed WAV (format tag " +
                              std::to_string(format) + ")");
  }
  if (format == 3 && bits != 32) {
    throw UnsupportedEncoding("float WAV must be 32-bit");
  }
  if (channels < 1 || channels > 2) {
    throw UnsupportedEncoding(std::to_string(channels) +
                              " channels (only mono/stereo supported)");
  }
  if (sample_rate == 0) throw MalformedWav("zero sample rate");

  const size_t bytes_per_sample = bits / 8;
  if (bytes_per_sample == 0) throw MalformedWav("zero bit depth");
  const size_t frame_size = bytes_per_sample * channels;
  const size_t n_frames = data.size() / frame_size;

  MultiChannelAudio out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.channels.assign(channels, std::vector<double>(n_frames));
  for (size_t i = 0; i < n_frames; ++i) {
    for (uint16_t c = 0; c < channels; ++c) {
      out.channels[c][i] =
          decode_sample(data, i * frame_size + c * bytes_per_sample, format,
                        bits);
    }
  }
  return out;
}

MultiChannelAudio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

AudioClip to_mono(const MultiChannelAudio& raw) {
  if (raw.channels.empty() || raw.channels.size() > 2) {
    throw UnsupportedEncoding("to_mono expects 1 or 2 channels");
  }
  AudioClip clip;
  clip.sample_rate = raw.sample_rate;
  if (raw.channels.size() == 1) {
    clip.samples = raw.channels[0];
    return clip;
  }
  const size_t n = raw.channels[0].size();
  clip.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    clip.samples[i] = (raw.channels[0][i] + raw.channels[1][i]) / 2.0;
  }
  return clip;
}

AudioClip to_mono(const AudioClip& clip) { return clip; }

AudioClip load_wav(const std::filesystem::path& path) {
  AudioClip clip = to_mono(read_wav(path));
  clip.id = path.stem().string();
  return clip;
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) {
    throw ConfigError("resample target rate must be positive");
  }
  if (target_rate == clip.sample_rate) return clip;

  const double ratio =
      static_cast<double>(target_rate) / static_cast<double>(clip.sample_rate);
  const long long in_len = static_cast<long long>(clip.samples.size());
  const long long out_len = std::llround(in_len * ratio);

  // Anti-alias cutoff relative to the source Nyquist; widened kernel when
  // downsampling so the 32 zero crossings still span the cutoff period.
  const double fc = std::min(1.0, ratio);
  const double half_width = 32.0 / fc;

  AudioClip out;
  out.sample_rate = target_rate;
  out.label = clip.label;
  out.id = clip.id;
  out.samples.resize(static_cast<size_t>(std::max(0ll, out_len)));

  for (long long j = 0; j < out_len; ++j) {
    const double center = j / ratio;
    const long long lo =
        std::max(0ll, static_cast<long long>(std::ceil(center - half_width)));
    const long long hi = std::min(
        in_len - 1, static_cast<long long>(std::floor(center + half_width)));
    double acc = 0.0;
    for (long long m = lo; m <= hi; ++m) {
      const double u = m - center;
      double k;
      const double x = fc * u;
      if (std::abs(x) < 1e-12) {
        k = fc;
      } else {
        k = fc * std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      }
      const double w =
          0.5 + 0.5 * std::cos(std::numbers::pi * u / half_width);
      acc += clip.samples[static_cast<size_t>(m)] * k * w;
    }
    out.samples[static_cast<size_t>(j)] = acc;
  }
  return out;
}

AudioClip fix_duration(const AudioClip& clip, double seconds) {
  const size_t target =
      static_cast<size_t>(std::llround(seconds * clip.sample_rate));
  AudioClip out = clip;
  out.samples.resize(target, 0.0);
  return out;
}

AudioClip canonicalize(const AudioClip& clip) {
  return fix_duration(resample(clip, kCanonicalRate), kClipSeconds);
}

std::vector<uint8_t> encode_wav16(
    const std::vector<std::vector<double>>& channels, int sample_rate) {
  const uint16_t n_channels = static_cast<uint16_t>(channels.size());
  const uint32_t n_frames =
      channels.empty() ? 0 : static_cast<uint32_t>(channels[0].size());
  const uint32_t data_size = n_frames * n_channels * 2;

  std::vector<uint8_t> out;
  out.reserve(44 + data_size);
  append_tag(out, "RIFF");
  append_u32(out, 36 + data_size);
  append_tag(out, "WAVE");
  append_tag(out, "fmt ");
  append_u32(out, 16);
  append_u16(out, 1);  // PCM
  append_u16(out, n_channels);
  append_u32(out, static_cast<uint32_t>(sample_rate));
  append_u32(out, static_cast<uint32_t>(sample_rate) * n_channels * 2);
  append_u16(out, n_channels * 2);
  append_u16(out, 16);
  append_tag(out, "data");
  append_u32(out, data_size);
  for (uint32_t i = 0; i < n_frames; ++i) {
    for (uint16_t c = 0; c < n_channels; ++c) {
      const double s = std::clamp(channels[c][i], -1.0, 1.0);
      const long q = std::lround(s * 32768.0);
      const int16_t v = static_cast<int16_t>(std::clamp(q, -32768l, 32767l));
      append_u16(out, static_cast<uint16_t>(v));
    }
  }
  return out;
}

std::vector<uint8_t> encode_wav16(const AudioClip& clip) {
  return encode_wav16({clip.samples}, clip.sample_rate);
}

void write_wav16(const std::filesystem::path& path, const AudioClip& clip) {
  const std::vector<uint8_t> bytes = encode_wav16(clip);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace radioclass
