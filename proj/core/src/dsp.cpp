#include "radioclass/dsp.hpp"

#include <cmath>
#include <numbers>

#include "radioclass/errors.hpp"

namespace radioclass {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Mirror index into [0, len) without duplicating the boundary sample,
// librosa-style reflect padding.
size_t reflect_index(long long i, long long len) {
  if (len == 1) return 0;
  const long long period = 2 * (len - 1);
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= len) m = period - m;
  return static_cast<size_t>(m);
}

}  // namespace

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) {
    w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / n);
  }
  return w;
}

Fft::Fft(int n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw NonPowerOfTwo("FFT size must be a power of two, got " +
                        std::to_string(n));
  }
  twiddle_.resize(n / 2);
  for (int k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * k / n;
    twiddle_[k] = {std::cos(angle), std::sin(angle)};
  }
  bitrev_.resize(n);
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < bits; ++b) {
      if (i & (1 << b)) r |= 1 << (bits - 1 - b);
    }
    bitrev_[i] = r;
  }
}

void Fft::transform(std::vector<std::complex<double>>& data,
                    bool inverse) const {
  const int n = n_;
  for (int i = 0; i < n; ++i) {
    const int j = bitrev_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len / 2;
    const int step = n / len;
    for (int start = 0; start < n; start += len) {
      for (int j = 0; j < half; ++j) {
        std::complex<double> w = twiddle_[j * step];
        if (inverse) w = std::conj(w);
        const std::complex<double> odd = data[start + j + half] * w;
        const std::complex<double> even = data[start + j];
        data[start + j] = even + odd;
        data[start + j + half] = even - odd;
      }
    }
  }
}

std::vector<std::complex<double>> Fft::forward_real(
    std::span<const double> signal) const {
  if (static_cast<int>(signal.size()) != n_) {
    throw DimensionMismatch("fft_real expects exactly n samples, got " +
                            std::to_string(signal.size()) + " for n=" +
                            std::to_string(n_));
  }
  std::vector<std::complex<double>> data(n_);
  for (int i = 0; i < n_; ++i) data[i] = {signal[i], 0.0};
  transform(data, /*inverse=*/false);
  data.resize(n_ / 2 + 1);
  return data;
}

std::vector<double> Fft::inverse_real(
    std::span<const std::complex<double>> bins) const {
  if (static_cast<int>(bins.size()) != n_ / 2 + 1) {
    throw DimensionMismatch("inverse_real expects n/2+1 bins, got " +
                            std::to_string(bins.size()));
  }
  std::vector<std::complex<double>> data(n_);
  for (int k = 0; k <= n_ / 2; ++k) data[k] = bins[k];
  for (int k = n_ / 2 + 1; k < n_; ++k) data[k] = std::conj(bins[n_ - k]);
  transform(data, /*inverse=*/true);
  std::vector<double> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = data[i].real() / n_;
  return out;
}

std::vector<std::complex<double>> fft_real(std::span<const double> signal,
                                           int n) {
  return Fft(n).forward_real(signal);
}

ComplexSpectrum stft(std::span<const double> samples, int n_fft, int hop,
                     std::span<const double> window, bool centered) {
  if (samples.empty()) {
    throw DimensionMismatch("stft requires at least one sample");
  }
  if (hop <= 0 || hop > n_fft) {
    throw DimensionMismatch("stft hop must satisfy 0 < hop <= n_fft");
  }
  if (static_cast<int>(window.size()) != n_fft) {
    throw DimensionMismatch("stft window length must equal n_fft");
  }

  const Fft fft(n_fft);
  const long long len = static_cast<long long>(samples.size());

  ComplexSpectrum spec;
  spec.n_fft = n_fft;
  spec.hop = hop;
  spec.window.assign(window.begin(), window.end());
  spec.centered = centered;
  spec.source_length = static_cast<int>(len);

  long long n_frames;
  if (centered) {
    n_frames = 1 + len / hop;
  } else {
    n_frames = len >= n_fft ? 1 + (len - n_fft) / hop : 1;
  }
  spec.frames.reserve(static_cast<size_t>(n_frames));

  std::vector<double> frame(n_fft);
  for (long long t = 0; t < n_frames; ++t) {
    const long long start =
        centered ? t * hop - n_fft / 2 : t * static_cast<long long>(hop);
    for (int k = 0; k < n_fft; ++k) {
      const long long idx = start + k;
      double s;
      if (centered) {
        s = samples[reflect_index(idx, len)];
      } else {
        s = (idx < len) ? samples[static_cast<size_t>(idx)] : 0.0;
      }
      frame[k] = s * window[k];
    }
    spec.frames.push_back(fft.forward_real(frame));
  }
  return spec;
}

std::vector<double> istft(const ComplexSpectrum& spec) {
  const int n_fft = spec.n_fft;
  const int hop = spec.hop;
  if (static_cast<int>(spec.window.size()) != n_fft) {
    throw DimensionMismatch("spectrum window length must equal n_fft");
  }

  // Constant-overlap-add check on the squared window: the tiled sum
  // sum_m w[pos + m*hop]^2 must be the same for every offset.
  {
    double lo = 0.0, hi = 0.0, total = 0.0;
    for (int pos = 0; pos < hop; ++pos) {
      double s = 0.0;
      for (int k = pos; k < n_fft; k += hop) s += spec.window[k] * spec.window[k];
      if (pos == 0) {
        lo = hi = s;
      } else {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      total += s;
    }
    const double mean = total / hop;
    if (mean <= 0.0 || (hi - lo) > 1e-8 * mean) {
      throw NonCOLAConfiguration(
          "window/hop pair fails constant-overlap-add (hop=" +
          std::to_string(hop) + ", n_fft=" + std::to_string(n_fft) + ")");
    }
  }

  const int n_frames = spec.n_frames();
  if (n_frames == 0) return {};

  const Fft fft(n_fft);
  const size_t buf_len =
      static_cast<size_t>(n_fft) + static_cast<size_t>(hop) * (n_frames - 1);
  std::vector<double> out(buf_len, 0.0);
  std::vector<double> norm(buf_len, 0.0);

  for (int t = 0; t < n_frames; ++t) {
    const std::vector<double> frame = fft.inverse_real(spec.frames[t]);
    const size_t offset = static_cast<size_t>(t) * hop;
    for (int k = 0; k < n_fft; ++k) {
      out[offset + k] += frame[k] * spec.window[k];
      norm[offset + k] += spec.window[k] * spec.window[k];
    }
  }
  for (size_t i = 0; i < buf_len; ++i) {
    if (norm[i] > 1e-12) out[i] /= norm[i];
  }

  const size_t start = spec.centered ? static_cast<size_t>(n_fft / 2) : 0;
  std::vector<double> result(static_cast<size_t>(spec.source_length), 0.0);
  for (size_t i = 0; i < result.size() && start + i < buf_len; ++i) {
    result[i] = out[start + i];
  }
  return result;
}

}  // namespace radioclass
