#pragma once

#include <cstddef>

#include "gompsnr/grid.hpp"
#include "gompsnr/wave.hpp"

namespace gompsnr {

struct StftConfig {
  std::size_t window_size = 1024;  // Hann window length; power of two
  std::size_t hop_size = 256;
  std::size_t fft_size = 1024;  // >= window_size, power of two
  bool center = true;           // reflect-pad by window_size/2 on both ends
};

// Throws invalid_config when hop > window, window/fft are not powers of two,
// fft < window, or hop == 0.
void validate(const StftConfig& cfg);

struct ComplexSpectrogram {
  Grid re, im;  // L x K
  StftConfig config;

  std::size_t frames() const { return re.rows(); }
  std::size_t bins() const { return re.cols(); }
};

struct MagPhase {
  Grid mag;    // >= 0 everywhere
  Grid phase;  // in [-pi, pi); 0 wherever mag == 0
};

// One-sided STFT, K = fft_size/2 + 1 bins, no normalization factor. Frame l
// covers padded samples [l*hop, l*hop + window). The Hann window is
// 0.5 - 0.5*cos(2*pi*m/window_size) for m in [0, window_size). Any global
// window scale cancels in the SNR-family ratios, so none is applied.
ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg);

// mag = sqrt(re^2 + im^2), phase = atan2(im, re) mapped into [-pi, pi).
// Zero bins get phase 0 so the derivative kernels see a deterministic value.
MagPhase to_mag_phase(const ComplexSpectrogram& s);

}  // namespace gompsnr
