#include "gompsnr/stft.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gompsnr/error.hpp"

namespace gompsnr {

namespace {

// Iterative radix-2 Cooley-Tukey, in place. n is a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Bouncing reflection without edge repetition (period 2n-2); degenerates to
// a constant for n == 1.
std::size_t reflect_index(long long i, long long n) {
  if (n == 1) return 0;
  long long period = 2 * (n - 1);
  long long r = i % period;
  if (r < 0) r += period;
  if (r >= n) r = period - r;
  return static_cast<std::size_t>(r);
}

}  // namespace

void validate(const StftConfig& cfg) {
  if (cfg.hop_size == 0 || cfg.hop_size > cfg.window_size) {
    raise(Errc::invalid_config, "hop size must be in [1, window size]");
  }
  if (!std::has_single_bit(cfg.window_size)) {
    raise(Errc::invalid_config, "window size must be a power of two");
  }
  if (cfg.fft_size < cfg.window_size || !std::has_single_bit(cfg.fft_size)) {
    raise(Errc::invalid_config, "fft size must be a power of two >= window size");
  }
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  validate(cfg);
  const std::size_t n = w.samples.size();
  const std::size_t win = cfg.window_size;
  if (n == 0 || (!cfg.center && n < win)) {
    raise(Errc::too_short, "signal of " + std::to_string(n) +
                               " samples is shorter than one window");
  }

  const long long pad = cfg.center ? static_cast<long long>(win / 2) : 0;
  const std::size_t padded = n + (cfg.center ? win : 0);
  const std::size_t frames = 1 + (padded - win) / cfg.hop_size;
  const std::size_t bins = cfg.fft_size / 2 + 1;

  std::vector<double> window(win);
  for (std::size_t m = 0; m < win; ++m) {
    window[m] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                     static_cast<double>(m) /
                                     static_cast<double>(win));
  }

  ComplexSpectrogram s;
  s.config = cfg;
  s.re = Grid(frames, bins);
  s.im = Grid(frames, bins);

  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (std::size_t l = 0; l < frames; ++l) {
    long long start = static_cast<long long>(l * cfg.hop_size) - pad;
    for (std::size_t m = 0; m < win; ++m) {
      long long idx = start + static_cast<long long>(m);
      double x = cfg.center
                     ? w.samples[reflect_index(idx, static_cast<long long>(n))]
                     : w.samples[static_cast<std::size_t>(idx)];
      buf[m] = window[m] * x;
    }
    for (std::size_t m = win; m < cfg.fft_size; ++m) buf[m] = 0.0;
    fft_radix2(buf);
    for (std::size_t k = 0; k < bins; ++k) {
      s.re(l, k) = buf[k].real();
      s.im(l, k) = buf[k].imag();
    }
  }
  return s;
}

MagPhase to_mag_phase(const ComplexSpectrogram& s) {
  MagPhase mp;
  mp.mag = Grid(s.re.rows(), s.re.cols());
  mp.phase = Grid(s.re.rows(), s.re.cols());
  auto re = s.re.data();
  auto im = s.im.data();
  auto mag = mp.mag.data();
  auto ph = mp.phase.data();
  for (std::size_t i = 0; i < re.size(); ++i) {
    if (re[i] == 0.0 && im[i] == 0.0) {
      mag[i] = 0.0;
      ph[i] = 0.0;
      continue;
    }
    mag[i] = std::hypot(re[i], im[i]);
    double p = std::atan2(im[i], re[i]);
    if (p == std::numbers::pi) p = -std::numbers::pi;  // keep [-pi, pi)
    ph[i] = p;
  }
  return mp;
}

}  // namespace gompsnr
