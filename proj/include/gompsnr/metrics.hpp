#pragma once

#include <string>

#include "gompsnr/grid.hpp"
#include "gompsnr/omniphase.hpp"
#include "gompsnr/stft.hpp"
#include "gompsnr/wave.hpp"

namespace gompsnr {

// The three definitions of the signed correlation component C in the T-F
// SNR denominator sum(|Y|^2 + |Yhat|^2 + C):
//   snr      C = -2|Y||Yhat| cos(theta - theta_hat)
//   ompsnr   C = -(2/9)|Y||Yhat| sum_i cos(D_i)
//   gompsnr  C =  (2/9)|Y||Yhat| sum_i (f_aw(D_i)/pi - 1)
// with D_i the difference of the i-th derivative channels. The gompsnr
// summands lie in [-1, 0], which keeps C non-positive.
enum class ComponentKind { snr, ompsnr, gompsnr };

inline constexpr double kDefaultDenomEps = 1e-12;

// Per-bin C for the chosen kind. The snr kind reads channel 8 (the
// instantaneous phase); ompsnr/gompsnr use all nine channels.
Grid correlation_component(ComponentKind kind, const Grid& mag_ref,
                           const Grid& mag_est, const DerivStack& d_ref,
                           const DerivStack& d_est);

// 10*log10(sum y^2 / sum (y - yhat)^2); +inf on an exactly zero residual.
double snr_time_db(const Waveform& ref, const Waveform& est);

struct TfSnr {
  double signal_energy = 0.0;  // sum |Y|^2
  double denominator = 0.0;    // sum(|Y|^2 + |Yhat|^2 + C), clamped at 0
  double db = 0.0;             // +inf when denominator < eps * signal_energy
};

// Assembles the T-F SNR of the chosen kind from magnitude grids and
// derivative stacks. The denominator is analytically >= 0 for ompsnr and
// gompsnr; the clamp only absorbs floating-point rounding.
TfSnr snr_family_grids(ComponentKind kind, const Grid& mag_ref,
                       const Grid& mag_est, const DerivStack& d_ref,
                       const DerivStack& d_est, double eps = kDefaultDenomEps);

double snr_family_db(ComponentKind kind, const Waveform& ref,
                     const Waveform& est, const StftConfig& cfg,
                     double eps = kDefaultDenomEps);

struct MetricReport {
  std::string id;
  double snr_time_db = 0.0;
  double snr_tf_db = 0.0;
  double ompsnr_db = 0.0;
  double gompsnr_db = 0.0;
  StftConfig settings;
};

// Raw energy sums behind each score, kept for pooled aggregation over a
// batch (sum of numerators over sum of denominators instead of mean dB).
struct MetricEnergies {
  double time_signal = 0.0;
  double time_residual = 0.0;
  double tf_signal = 0.0;
  double denom_snr = 0.0;
  double denom_ompsnr = 0.0;
  double denom_gompsnr = 0.0;
};

struct ScoredPair {
  MetricReport report;
  MetricEnergies energies;
};

// Aligns the pair, runs one STFT pass per signal and derives all four
// scores from it. Alignment and silence errors are rethrown with the pair
// id prefixed to the message.
ScoredPair score_pair(const std::string& id, const Waveform& ref,
                      const Waveform& est, const StftConfig& cfg,
                      AlignPolicy align = AlignPolicy::strict,
                      double eps = kDefaultDenomEps);

}  // namespace gompsnr
