#include "radioclass/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "radioclass/audio_io.hpp"
#include "radioclass/dsp.hpp"
#include "radioclass/errors.hpp"

namespace radioclass {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

double MelFilterBank::center_frequency(int m) const {
  const double lo = hz_to_mel(fmin);
  const double hi = hz_to_mel(fmax);
  const double step = (hi - lo) / (n_mels() + 1);
  return mel_to_hz(lo + step * (m + 1));
}

MelFilterBank build_mel_filterbank(int n_mels, int n_fft, int sample_rate,
                                   double fmin, double fmax) {
  const double nyquist = sample_rate / 2.0;
  if (n_mels < 1 || fmin < 0.0 || fmin >= fmax || fmax > nyquist) {
    throw InvalidRange("need 0 <= fmin < fmax <= nyquist and n_mels >= 1");
  }

  const int n_bins = n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);

  // n_mels + 2 breakpoints equally spaced in mel; filter m spans
  // breakpoints [m, m+2] with its peak at m+1.
  std::vector<double> breakpoints(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    breakpoints[i] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  }

  MelFilterBank bank;
  bank.fmin = fmin;
  bank.fmax = fmax;
  bank.sample_rate = sample_rate;
  bank.n_fft = n_fft;
  bank.weights.assign(n_mels, std::vector<double>(n_bins, 0.0));

  for (int m = 0; m < n_mels; ++m) {
    const double lo = breakpoints[m];
    const double center = breakpoints[m + 1];
    const double hi = breakpoints[m + 2];
    double peak = 0.0;
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      double w = 0.0;
      if (f > lo && f < hi) {
        const double rise = center > lo ? (f - lo) / (center - lo) : 1.0;
        const double fall = hi > center ? (hi - f) / (hi - center) : 1.0;
        w = std::max(0.0, std::min(rise, fall));
      }
      bank.weights[m][k] = w;
      peak = std::max(peak, w);
    }
    if (peak > 0.0) {
      for (double& w : bank.weights[m]) w /= peak;
    }
  }
  return bank;
}

const MelFilterBank& default_filterbank() {
  static const MelFilterBank bank = build_mel_filterbank(
      kMelBands, kFftSize, kCanonicalRate, 0.0, kCanonicalRate / 2.0);
  return bank;
}

std::string to_string(SpectralVariant v) {
  return v == SpectralVariant::Mel ? "mel" : "log-mel";
}

SpectralVariant parse_spectral_variant(const std::string& text) {
  if (text == "mel") return SpectralVariant::Mel;
  if (text == "log-mel" || text == "log_mel" || text == "logmel") {
    return SpectralVariant::LogMel;
  }
  throw ConfigError("unknown spectral variant '" + text + "'");
}

Spectrogram mel_spectrogram(const AudioClip& clip, const MelFilterBank& bank,
                            int n_fft, int hop) {
  const std::vector<double> window = hann_window(n_fft);
  const ComplexSpectrum spec =
      stft(clip.samples, n_fft, hop, window, /*centered=*/true);

  const int n_mels = bank.n_mels();
  const int n_bins = spec.n_bins();
  if (bank.n_bins() != n_bins) {
    throw DimensionMismatch("filterbank built for different n_fft");
  }

  Spectrogram out;
  out.scale = Spectrogram::Scale::Power;
  out.clip_id = clip.id;
  out.values.assign(n_mels, std::vector<double>(kSpectrogramFrames, 0.0));

  const int n_frames = std::min(spec.n_frames(), kSpectrogramFrames);
  std::vector<double> power(n_bins);
  for (int n = 0; n < n_frames; ++n) {
    for (int k = 0; k < n_bins; ++k) power[k] = std::norm(spec.frames[n][k]);
    for (int m = 0; m < n_mels; ++m) {
      const std::vector<double>& row = bank.weights[m];
      double acc = 0.0;
      for (int k = 0; k < n_bins; ++k) acc += power[k] * row[k];
      out.values[m][n] = acc;
    }
  }
  return out;
}

Spectrogram power_to_db(const Spectrogram& spec, double eps) {
  Spectrogram out = spec;
  out.scale = Spectrogram::Scale::Db;
  for (auto& row : out.values) {
    for (double& v : row) {
      if (v < 0.0) throw NegativeInput("power values must be >= 0");
      v = 10.0 * std::log10(v + eps);
    }
  }
  return out;
}

Spectrogram normalize_minmax(const Spectrogram& spec) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : spec.values) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  Spectrogram out = spec;
  out.scale = Spectrogram::Scale::Normalized;
  const double range = hi - lo;
  for (auto& row : out.values) {
    for (double& v : row) {
      v = range > 0.0 ? (v - lo) / range : 0.0;
    }
  }
  return out;
}

Spectrogram spectral_pipeline(const AudioClip& clip, SpectralVariant variant) {
  const AudioClip canonical = canonicalize(clip);
  Spectrogram spec =
      mel_spectrogram(canonical, default_filterbank(), kFftSize, kHopSize);
  if (variant == SpectralVariant::LogMel) {
    spec = power_to_db(spec);
  }
  return normalize_minmax(spec);
}

FeatureVector pool_spectrogram(const Spectrogram& spec) {
  const int rows = spec.rows();
  const int cols = spec.cols();
  FeatureVector out(static_cast<size_t>(rows) * 2, 0.0);
  for (int m = 0; m < rows; ++m) {
    double mean = 0.0;
    for (double v : spec.values[m]) mean += v;
    mean /= cols;
    double var = 0.0;
    for (double v : spec.values[m]) var += (v - mean) * (v - mean);
    var /= cols;
    out[m] = mean;
    out[rows + m] = std::sqrt(var);
  }
  return out;
}

FeatureVector flatten_spectrogram(const Spectrogram& spec) {
  FeatureVector out;
  out.reserve(static_cast<size_t>(spec.rows()) * spec.cols());
  for (const auto& row : spec.values) {
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

namespace {
constexpr uint16_t kMelsVersion = 1;
}

void write_mels_file(const std::filesystem::path& path,
                     const Spectrogram& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());

  const uint16_t rows = static_cast<uint16_t>(spec.rows());
  const uint16_t cols = static_cast<uint16_t>(spec.cols());
  const uint8_t scale = static_cast<uint8_t>(spec.scale);

  auto put_u16 = [&out](uint16_t v) {
    const char bytes[2] = {static_cast<char>(v & 0xff),
                           static_cast<char>((v >> 8) & 0xff)};
    out.write(bytes, 2);
  };
  out.write("MELS", 4);
  put_u16(kMelsVersion);
  put_u16(rows);
  put_u16(cols);
  out.put(static_cast<char>(scale));

  for (const auto& row : spec.values) {
    for (double v : row) {
      const float f = static_cast<float>(v);
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      const char bytes[4] = {static_cast<char>(bits & 0xff),
                             static_cast<char>((bits >> 8) & 0xff),
                             static_cast<char>((bits >> 16) & 0xff),
                             static_cast<char>((bits >> 24) & 0xff)};
      out.write(bytes, 4);
    }
  }
  if (!out) throw IoError("short write to " + path.string());
}

Spectrogram read_mels_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 11 || std::memcmp(bytes.data(), "MELS", 4) != 0) {
    throw IoError("not a MELS file: " + path.string());
  }
  auto get_u16 = [&bytes](size_t off) {
    return static_cast<uint16_t>(bytes[off] | (bytes[off + 1] << 8));
  };
  const uint16_t version = get_u16(4);
  if (version != kMelsVersion) {
    throw IoError("unsupported MELS version " + std::to_string(version));
  }
  const uint16_t rows = get_u16(6);
  const uint16_t cols = get_u16(8);
  const uint8_t scale = bytes[10];
  if (bytes.size() != 11 + static_cast<size_t>(rows) * cols * 4) {
    throw IoError("MELS payload size mismatch in " + path.string());
  }

  Spectrogram spec;
  spec.scale = static_cast<Spectrogram::Scale>(scale);
  spec.clip_id = path.stem().string();
  spec.values.assign(rows, std::vector<double>(cols));
  size_t off = 11;
  for (uint16_t m = 0; m < rows; ++m) {
    for (uint16_t n = 0; n < cols; ++n, off += 4) {
      uint32_t bits = static_cast<uint32_t>(bytes[off]) |
                      (static_cast<uint32_t>(bytes[off + 1]) << 8) |
                      (static_cast<uint32_t>(bytes[off + 2]) << 16) |
                      (static_cast<uint32_t>(bytes[off + 3]) << 24);
      float f;
      std::memcpy(&f, &bits, 4);
      spec.values[m][n] = f;
    }
  }
  return spec;
}

}  // namespace radioclass
