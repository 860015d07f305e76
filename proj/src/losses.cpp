#include "gompsnr/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gompsnr/error.hpp"
#include "gompsnr/numeric.hpp"

namespace gompsnr {

namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double x) { return (x > 0.0) ? 1.0 : (x < 0.0) ? -1.0 : 0.0; }

double dist(Distance d, double a, double b) {
  return d == Distance::l1 ? std::fabs(a - b) : (a - b) * (a - b);
}

// d dist / d b; sign(0) = 0 at l1 ties.
double dist_db(Distance d, double a, double b) {
  return d == Distance::l1 ? -sgn(a - b) : -2.0 * (a - b);
}

void check_stacks(const DerivStack& d_ref, const DerivStack& d_est) {
  for (std::size_t i = 0; i < 9; ++i) {
    if (!d_ref.channels[i].same_shape(d_ref.channels[0]) ||
        !d_est.channels[i].same_shape(d_ref.channels[0])) {
      raise(Errc::shape_mismatch, "derivative stacks have mismatched shapes");
    }
  }
  if (d_ref.channels[0].empty()) {
    raise(Errc::invalid_input, "empty derivative stacks");
  }
}

void check_grid(const Grid& g, const DerivStack& d, const char* what) {
  if (!g.same_shape(d.channels[0])) {
    raise(Errc::shape_mismatch, std::string(what) + " does not match stack shape");
  }
}

double max_magnitude(const Grid& mag) {
  double m = 0.0;
  for (double v : mag.data()) m = std::max(m, v);
  return m;
}

// Accumulates the adjoint correlation of `g` into `out`, scaled.
void add_adjoint(const Grid& g, const Kernel3& k, double scale, Grid& out) {
  Grid a = correlate3_replicate_adjoint(g, k);
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
}

}  // namespace

double loss_op_value(const DerivStack& d_ref, const DerivStack& d_est) {
  check_stacks(d_ref, d_est);
  KahanSum s;
  for (std::size_t i = 0; i < 9; ++i) {
    auto r = d_ref.channels[i].data();
    auto e = d_est.channels[i].data();
    for (std::size_t j = 0; j < r.size(); ++j) s.add(anti_wrap(r[j] - e[j]));
  }
  return s.value() / (9.0 * static_cast<double>(d_ref.channels[0].size()));
}

double loss_wop_value(const Grid& mag_ref, const DerivStack& d_ref,
                      const DerivStack& d_est, double eps) {
  check_stacks(d_ref, d_est);
  check_grid(mag_ref, d_ref, "magnitude grid");
  double denom = max_magnitude(mag_ref) + eps;
  KahanSum s;
  for (std::size_t i = 0; i < 9; ++i) {
    auto r = d_ref.channels[i].data();
    auto e = d_est.channels[i].data();
    auto m = mag_ref.data();
    for (std::size_t j = 0; j < r.size(); ++j) {
      s.add(m[j] / denom * anti_wrap(r[j] - e[j]));
    }
  }
  return s.value() / (9.0 * static_cast<double>(d_ref.channels[0].size()));
}

double loss_ori_value(const Grid& mag_ref, const DerivStack& d_ref,
                      const Grid& mag_est, const DerivStack& d_est,
                      Distance distance) {
  check_stacks(d_ref, d_est);
  check_grid(mag_ref, d_ref, "reference magnitude");
  check_grid(mag_est, d_ref, "estimated magnitude");
  KahanSum s;
  for (std::size_t i = 0; i < 9; ++i) {
    auto r = d_ref.channels[i].data();
    auto e = d_est.channels[i].data();
    auto mr = mag_ref.data();
    auto me = mag_est.data();
    for (std::size_t j = 0; j < r.size(); ++j) {
      double gr = wrap_to_pi(r[j]);
      double ge = wrap_to_pi(e[j]);
      s.add(dist(distance, mr[j] * std::cos(gr), me[j] * std::cos(ge)));
      s.add(dist(distance, mr[j] * std::sin(gr), me[j] * std::sin(ge)));
    }
  }
  return s.value() / (9.0 * static_cast<double>(d_ref.channels[0].size()));
}

double loss_cori_value(const Grid& mag_ref, const Grid& mag_est,
                       const DerivStack& d_ref, const DerivStack& d_est,
                       Distance distance) {
  check_stacks(d_ref, d_est);
  check_grid(mag_ref, d_ref, "reference magnitude");
  check_grid(mag_est, d_ref, "estimated magnitude");
  KahanSum s;
  for (std::size_t i = 0; i < 9; ++i) {
    auto r = d_ref.channels[i].data();
    auto e = d_est.channels[i].data();
    auto mr = mag_ref.data();
    auto me = mag_est.data();
    for (std::size_t j = 0; j < r.size(); ++j) {
      s.add(dist(distance, mr[j], me[j]) * anti_wrap(r[j] - e[j]));
    }
  }
  return 2.0 / (9.0 * kPi) * s.value() /
         static_cast<double>(d_ref.channels[0].size());
}

LossResult loss_op(const Grid& phase_ref, const Grid& phase_est,
                   bool with_grad) {
  if (!phase_ref.same_shape(phase_est)) {
    raise(Errc::shape_mismatch, "phase grids have mismatched shapes");
  }
  DerivStack d_ref = omni_derivatives(phase_ref);
  DerivStack d_est = omni_derivatives(phase_est);
  LossResult out;
  out.value = loss_op_value(d_ref, d_est);
  if (!with_grad) return out;

  const double scale = -1.0 / (9.0 * static_cast<double>(phase_ref.size()));
  Grid grad(phase_ref.rows(), phase_ref.cols());
  Grid g(phase_ref.rows(), phase_ref.cols());
  for (std::size_t i = 0; i < 9; ++i) {
    auto r = d_ref.channels[i].data();
    auto e = d_est.channels[i].data();
    auto gv = g.data();
    for (std::size_t j = 0; j < r.size(); ++j) {
      gv[j] = sgn(wrap_to_pi(r[j] - e[j]));
    }
    add_adjoint(g, omni_kernels().kernels[i], scale, grad);
  }
  out.grad_phase_est = std::move(grad);
  return out;
}

LossResult loss_wop(const Grid& mag_ref, const Grid& phase_ref,
                    const Grid& phase_est, double eps, bool with_grad) {
  if (!phase_ref.same_shape(phase_est) || !mag_ref.same_shape(phase_ref)) {
    raise(Errc::shape_mismatch, "wop grids have mismatched shapes");
  }
  DerivStack d_ref = omni_derivatives(phase_ref);
  DerivStack d_est = omni_derivatives(phase_est);
  LossResult out;
  out.value = loss_wop_value(mag_ref, d_ref, d_est, eps);
  if (!with_grad) return out;

  const double denom = max_magnitude(mag_ref) + eps;
  const double scale = -1.0 / (9.0 * static_cast<double>(phase_ref.size()));
  Grid grad(phase_ref.rows(), phase_ref.cols());
  Grid g(phase_ref.rows(), phase_ref.cols());
  for (std::size_t i = 0; i < 9; ++i) {
    auto r = d_ref.channels[i].data();
    auto e = d_est.channels[i].data();
    auto m = mag_ref.data();
    auto gv = g.data();
    for (std::size_t j = 0; j < r.size(); ++j) {
      gv[j] = m[j] / denom * sgn(wrap_to_pi(r[j] - e[j]));
    }
    add_adjoint(g, omni_kernels().kernels[i], scale, grad);
  }
  out.grad_phase_est = std::move(grad);
  return out;
}

LossResult loss_ori(const Grid& mag_ref, const Grid& phase_ref,
                    const Grid& mag_est, const Grid& phase_est,
                    Distance distance, bool with_grad) {
  if (!phase_ref.same_shape(phase_est) || !mag_ref.same_shape(phase_ref) ||
      !mag_est.same_shape(phase_ref)) {
    raise(Errc::shape_mismatch, "ori grids have mismatched shapes");
  }
  DerivStack d_ref = omni_derivatives(phase_ref);
  DerivStack d_est = omni_derivatives(phase_est);
  LossResult out;
  out.value = loss_ori_value(mag_ref, d_ref, mag_est, d_est, distance);
  if (!with_grad) return out;

  const double scale = 1.0 / (9.0 * static_cast<double>(phase_ref.size()));
  Grid grad_mag(phase_ref.rows(), phase_ref.cols());
  Grid grad_phase(phase_ref.rows(), phase_ref.cols());
  Grid g(phase_ref.rows(), phase_ref.cols());
  for (std::size_t i = 0; i < 9; ++i) {
    auto r = d_ref.channels[i].data();
    auto e = d_est.channels[i].data();
    auto mr = mag_ref.data();
    auto me = mag_est.data();
    auto gm = grad_mag.data();
    auto gv = g.data();
    for (std::size_t j = 0; j < r.size(); ++j) {
      double gr = wrap_to_pi(r[j]);
      double ge = wrap_to_pi(e[j]);
      double cr = std::cos(gr), sr = std::sin(gr);
      double ce = std::cos(ge), se = std::sin(ge);
      double dc = dist_db(distance, mr[j] * cr, me[j] * ce);
      double ds = dist_db(distance, mr[j] * sr, me[j] * se);
      gm[j] += scale * (dc * ce + ds * se);
      gv[j] = dc * (-me[j] * se) + ds * (me[j] * ce);
    }
    add_adjoint(g, omni_kernels().kernels[i], scale, grad_phase);
  }
  out.grad_mag_est = std::move(grad_mag);
  out.grad_phase_est = std::move(grad_phase);
  return out;
}

LossResult loss_cori(const Grid& mag_ref, const Grid& phase_ref,
                     const Grid& mag_est, const Grid& phase_est,
                     Distance distance, bool with_grad) {
  if (!phase_ref.same_shape(phase_est) || !mag_ref.same_shape(phase_ref) ||
      !mag_est.same_shape(phase_ref)) {
    raise(Errc::shape_mismatch, "cori grids have mismatched shapes");
  }
  DerivStack d_ref = omni_derivatives(phase_ref);
  DerivStack d_est = omni_derivatives(phase_est);
  LossResult out;
  out.value = loss_cori_value(mag_ref, mag_est, d_ref, d_est, distance);
  if (!with_grad) return out;

  const double scale =
      2.0 / (9.0 * kPi * static_cast<double>(phase_ref.size()));
  Grid grad_mag(phase_ref.rows(), phase_ref.cols());
  Grid grad_phase(phase_ref.rows(), phase_ref.cols());
  Grid g(phase_ref.rows(), phase_ref.cols());
  for (std::size_t i = 0; i < 9; ++i) {
    auto r = d_ref.channels[i].data();
    auto e = d_est.channels[i].data();
    auto mr = mag_ref.data();
    auto me = mag_est.data();
    auto gm = grad_mag.data();
    auto gv = g.data();
    for (std::size_t j = 0; j < r.size(); ++j) {
      double w = wrap_to_pi(r[j] - e[j]);
      gm[j] += scale * dist_db(distance, mr[j], me[j]) * std::fabs(w);
      gv[j] = dist(distance, mr[j], me[j]) * sgn(w);
    }
    add_adjoint(g, omni_kernels().kernels[i], -scale, grad_phase);
  }
  out.grad_mag_est = std::move(grad_mag);
  out.grad_phase_est = std::move(grad_phase);
  return out;
}

LossResult evaluate_loss(LossKind kind, Distance dist, const MagPhase& ref,
                         const MagPhase& est, bool with_grad, double wop_eps) {
  switch (kind) {
    case LossKind::op:
      return loss_op(ref.phase, est.phase, with_grad);
    case LossKind::wop:
      return loss_wop(ref.mag, ref.phase, est.phase, wop_eps, with_grad);
    case LossKind::ori:
      return loss_ori(ref.mag, ref.phase, est.mag, est.phase, dist, with_grad);
    case LossKind::cori:
      return loss_cori(ref.mag, ref.phase, est.mag, est.phase, dist, with_grad);
  }
  raise(Errc::invalid_config, "unknown loss kind");
}

std::pair<Grid, Grid> polar_grad_to_rect(const Grid& mag_est,
                                         const Grid& phase_est,
                                         const Grid& grad_mag,
                                         const Grid& grad_phase) {
  if (!mag_est.same_shape(phase_est) || !grad_mag.same_shape(mag_est) ||
      !grad_phase.same_shape(mag_est)) {
    raise(Errc::shape_mismatch, "polar gradient grids have mismatched shapes");
  }
  Grid gre(mag_est.rows(), mag_est.cols());
  Grid gim(mag_est.rows(), mag_est.cols());
  auto m = mag_est.data();
  auto p = phase_est.data();
  auto gm = grad_mag.data();
  auto gp = grad_phase.data();
  auto re = gre.data();
  auto im = gim.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    double c = std::cos(p[i]);
    double s = std::sin(p[i]);
    double phase_term = m[i] > 0.0 ? gp[i] / m[i] : 0.0;
    re[i] = gm[i] * c - phase_term * s;
    im[i] = gm[i] * s + phase_term * c;
  }
  return {std::move(gre), std::move(gim)};
}

}  // namespace gompsnr
