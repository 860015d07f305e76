#include "gompsnr/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gompsnr/error.hpp"
#include "gompsnr/numeric.hpp"

namespace gompsnr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const Grid& mag_ref, const Grid& mag_est,
                  const DerivStack& d_ref, const DerivStack& d_est) {
  bool ok = mag_ref.same_shape(mag_est);
  for (std::size_t i = 0; i < 9 && ok; ++i) {
    ok = d_ref.channels[i].same_shape(mag_ref) &&
         d_est.channels[i].same_shape(mag_ref);
  }
  if (!ok) raise(Errc::shape_mismatch, "metric grids have mismatched shapes");
}

// Per-bin channel term of C, divided by 2|Y||Yhat|. The sum over channels is
// divided by 9 before the magnitude product so matched inputs cancel the
// |Y|^2 + |Yhat|^2 part exactly.
inline double channel_factor(ComponentKind kind, const DerivStack& d_ref,
                             const DerivStack& d_est, std::size_t l,
                             std::size_t k) {
  switch (kind) {
    case ComponentKind::snr:
      return -std::cos(wrap_to_pi(d_ref.channels[8](l, k) - d_est.channels[8](l, k)));
    case ComponentKind::ompsnr: {
      double s = 0.0;
      for (std::size_t i = 0; i < 9; ++i) {
        s += std::cos(wrap_to_pi(d_ref.channels[i](l, k) - d_est.channels[i](l, k)));
      }
      return -s / 9.0;
    }
    case ComponentKind::gompsnr: {
      double s = 0.0;
      for (std::size_t i = 0; i < 9; ++i) {
        s += anti_wrap(d_ref.channels[i](l, k) - d_est.channels[i](l, k)) /
                 std::numbers::pi -
             1.0;
      }
      return s / 9.0;
    }
  }
  return 0.0;
}

}  // namespace

Grid correlation_component(ComponentKind kind, const Grid& mag_ref,
                           const Grid& mag_est, const DerivStack& d_ref,
                           const DerivStack& d_est) {
  check_shapes(mag_ref, mag_est, d_ref, d_est);
  Grid c(mag_ref.rows(), mag_ref.cols());
  for (std::size_t l = 0; l < c.rows(); ++l) {
    for (std::size_t k = 0; k < c.cols(); ++k) {
      c(l, k) = 2.0 * mag_ref(l, k) * mag_est(l, k) *
                channel_factor(kind, d_ref, d_est, l, k);
    }
  }
  return c;
}

double snr_time_db(const Waveform& ref, const Waveform& est) {
  if (ref.sample_rate != est.sample_rate) {
    raise(Errc::sample_rate_mismatch, "time SNR needs equal sample rates");
  }
  if (ref.samples.size() != est.samples.size()) {
    raise(Errc::length_mismatch, "time SNR needs equal lengths");
  }
  KahanSum sig, res;
  for (std::size_t i = 0; i < ref.samples.size(); ++i) {
    double y = ref.samples[i];
    double d = y - est.samples[i];
    sig.add(y * y);
    res.add(d * d);
  }
  if (sig.value() <= 0.0) raise(Errc::silent_reference, "reference is silent");
  if (res.value() <= 0.0) return kInf;
  return 10.0 * std::log10(sig.value() / res.value());
}

TfSnr snr_family_grids(ComponentKind kind, const Grid& mag_ref,
                       const Grid& mag_est, const DerivStack& d_ref,
                       const DerivStack& d_est, double eps) {
  check_shapes(mag_ref, mag_est, d_ref, d_est);
  KahanSum sig, den;
  for (std::size_t l = 0; l < mag_ref.rows(); ++l) {
    for (std::size_t k = 0; k < mag_ref.cols(); ++k) {
      double mr = mag_ref(l, k);
      double me = mag_est(l, k);
      double c = 2.0 * mr * me * channel_factor(kind, d_ref, d_est, l, k);
      sig.add(mr * mr);
      den.add(mr * mr + me * me + c);
    }
  }
  TfSnr out;
  out.signal_energy = sig.value();
  if (out.signal_energy <= 0.0) {
    raise(Errc::silent_reference, "reference spectrogram is silent");
  }
  out.denominator = std::max(den.value(), 0.0);
  if (out.denominator < eps * out.signal_energy) {
    out.db = kInf;
  } else {
    out.db = 10.0 * std::log10(out.signal_energy / out.denominator);
  }
  return out;
}

double snr_family_db(ComponentKind kind, const Waveform& ref,
                     const Waveform& est, const StftConfig& cfg, double eps) {
  if (ref.sample_rate != est.sample_rate) {
    raise(Errc::sample_rate_mismatch, "T-F SNR needs equal sample rates");
  }
  if (ref.samples.size() != est.samples.size()) {
    raise(Errc::length_mismatch, "T-F SNR needs an aligned pair");
  }
  MagPhase mp_ref = to_mag_phase(stft(ref, cfg));
  MagPhase mp_est = to_mag_phase(stft(est, cfg));
  DerivStack d_ref = omni_derivatives(mp_ref.phase);
  DerivStack d_est = omni_derivatives(mp_est.phase);
  return snr_family_grids(kind, mp_ref.mag, mp_est.mag, d_ref, d_est, eps).db;
}

ScoredPair score_pair(const std::string& id, const Waveform& ref,
                      const Waveform& est, const StftConfig& cfg,
                      AlignPolicy align, double eps) {
  try {
    auto [r, e] = align_pair(ref, est, align, cfg.window_size);

    ScoredPair out;
    out.report.id = id;
    out.report.settings = cfg;
    out.report.snr_time_db = snr_time_db(r, e);

    KahanSum tsig, tres;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      double y = r.samples[i];
      double d = y - e.samples[i];
      tsig.add(y * y);
      tres.add(d * d);
    }
    out.energies.time_signal = tsig.value();
    out.energies.time_residual = tres.value();

    MagPhase mp_ref = to_mag_phase(stft(r, cfg));
    MagPhase mp_est = to_mag_phase(stft(e, cfg));
    DerivStack d_ref = omni_derivatives(mp_ref.phase);
    DerivStack d_est = omni_derivatives(mp_est.phase);

    TfSnr snr = snr_family_grids(ComponentKind::snr, mp_ref.mag, mp_est.mag,
                                 d_ref, d_est, eps);
    TfSnr omp = snr_family_grids(ComponentKind::ompsnr, mp_ref.mag, mp_est.mag,
                                 d_ref, d_est, eps);
    TfSnr gomp = snr_family_grids(ComponentKind::gompsnr, mp_ref.mag,
                                  mp_est.mag, d_ref, d_est, eps);
    out.report.snr_tf_db = snr.db;
    out.report.ompsnr_db = omp.db;
    out.report.gompsnr_db = gomp.db;
    out.energies.tf_signal = snr.signal_energy;
    out.energies.denom_snr = snr.denominator;
    out.energies.denom_ompsnr = omp.denominator;
    out.energies.denom_gompsnr = gomp.denominator;
    return out;
  } catch (const Error& e) {
    throw Error(e.code(), id + ": " + e.what());
  }
}

}  // namespace gompsnr
