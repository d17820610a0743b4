#pragma once

#include <complex>
#include <span>
#include <vector>

#include "radioclass/types.hpp"

namespace radioclass {

/// Periodic Hann window: w[k] = 0.5 - 0.5*cos(2*pi*k/n). COLA-compatible
/// with hop = n/4, which is the configuration both pipelines use.
std::vector<double> hann_window(int n);

// Radix-2 FFT with twiddle and bit-reversal tables built once per size.
// Construct one instance and reuse it across frames.
class Fft {
 public:
  explicit Fft(int n);  // throws NonPowerOfTwo

  int size() const { return n_; }

  /// Forward transform of a real signal of length n. Returns the n/2+1
  /// non-redundant bins; bin k = sum_t s[t]*exp(-2*pi*i*k*t/n).
  std::vector<std::complex<double>> forward_real(
      std::span<const double> signal) const;

  /// Inverse of forward_real: reconstructs the length-n real signal from
  /// n/2+1 half-spectrum bins (hermitian symmetry assumed).
  std::vector<double> inverse_real(
      std::span<const std::complex<double>> bins) const;

 private:
  void transform(std::vector<std::complex<double>>& data,
                 bool inverse) const;

  int n_;
  std::vector<std::complex<double>> twiddle_;  // exp(-2*pi*i*k/n), k < n/2
  std::vector<int> bitrev_;
};

/// One-shot convenience wrapper around Fft::forward_real.
std::vector<std::complex<double>> fft_real(std::span<const double> signal,
                                           int n);

// STFT frames; frames[t][k] with k < n_bins = n_fft/2 + 1.
struct ComplexSpectrum {
  std::vector<std::vector<std::complex<double>>> frames;
  int n_fft = 0;
  int hop = 0;
  std::vector<double> window;
  bool centered = true;
  int source_length = 0;  // sample count of the analyzed signal

  int n_frames() const { return static_cast<int>(frames.size()); }
  int n_bins() const { return n_fft / 2 + 1; }
};

/// Windowed STFT. When centered, the signal is reflect-padded by n_fft/2 on
/// each side so frame t covers samples [t*hop - n_fft/2, t*hop + n_fft/2)
/// and n_frames == 1 + floor(len/hop).
ComplexSpectrum stft(std::span<const double> samples, int n_fft, int hop,
                     std::span<const double> window, bool centered);

/// Overlap-add inverse with window-square normalization. Requires a
/// COLA-satisfying window/hop pair (checked; NonCOLAConfiguration
/// otherwise). Output length equals the analyzed sample count.
std::vector<double> istft(const ComplexSpectrum& spec);

}  // namespace radioclass
