#pragma once

#include <optional>
#include <utility>

#include "gompsnr/grid.hpp"
#include "gompsnr/omniphase.hpp"
#include "gompsnr/stft.hpp"

namespace gompsnr {

enum class LossKind { op, wop, ori, cori };

// Point-wise distance h(a, b): |a - b| for l1, (a - b)^2 for l2.
enum class Distance { l1, l2 };

inline constexpr double kDefaultWopEps = 1e-8;

struct LossResult {
  double value = 0.0;
  // d value / d |Yhat|. Absent for op/wop, which do not read the estimated
  // magnitude at all.
  std::optional<Grid> grad_mag_est;
  // d value / d theta_hat. Subgradient convention sign(0) = 0 at the
  // anti-wrapping kinks and at l1 ties.
  std::optional<Grid> grad_phase_est;
};

// Value-only entry points over precomputed derivative stacks.
//
//   op    mean over 9KL of f_aw(D_i)
//   wop   same, each bin weighted by |Y| / (max|Y| + eps)
//   ori   mean over 9KL of h(|Y|cos g_i, |Yhat|cos ghat_i)
//                        + h(|Y|sin g_i, |Yhat|sin ghat_i)
//   cori  (2/pi) * mean over 9KL of h(|Y|, |Yhat|) * f_aw(D_i)
//
// where g_i / ghat_i are the derivative channels and D_i their difference.
double loss_op_value(const DerivStack& d_ref, const DerivStack& d_est);
double loss_wop_value(const Grid& mag_ref, const DerivStack& d_ref,
                      const DerivStack& d_est, double eps = kDefaultWopEps);
double loss_ori_value(const Grid& mag_ref, const DerivStack& d_ref,
                      const Grid& mag_est, const DerivStack& d_est,
                      Distance dist);
double loss_cori_value(const Grid& mag_ref, const Grid& mag_est,
                       const DerivStack& d_ref, const DerivStack& d_est,
                       Distance dist);

LossResult loss_op(const Grid& phase_ref, const Grid& phase_est,
                   bool with_grad = false);
LossResult loss_wop(const Grid& mag_ref, const Grid& phase_ref,
                    const Grid& phase_est, double eps = kDefaultWopEps,
                    bool with_grad = false);
LossResult loss_ori(const Grid& mag_ref, const Grid& phase_ref,
                    const Grid& mag_est, const Grid& phase_est, Distance dist,
                    bool with_grad = false);
LossResult loss_cori(const Grid& mag_ref, const Grid& phase_ref,
                     const Grid& mag_est, const Grid& phase_est, Distance dist,
                     bool with_grad = false);

// Dispatcher over (magnitude, phase) pairs; ref supplies Y, est Yhat.
LossResult evaluate_loss(LossKind kind, Distance dist, const MagPhase& ref,
                         const MagPhase& est, bool with_grad = false,
                         double wop_eps = kDefaultWopEps);

// Chain rule from (grad_mag, grad_phase) at the estimate to gradients
// w.r.t. the rectangular parts (re, im). Where mag == 0 the phase direction
// is undefined and contributes nothing.
std::pair<Grid, Grid> polar_grad_to_rect(const Grid& mag_est,
                                         const Grid& phase_est,
                                         const Grid& grad_mag,
                                         const Grid& grad_phase);

}  // namespace gompsnr
