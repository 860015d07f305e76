#include "gompsnr/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gompsnr/losses.hpp"
#include "gompsnr/metrics.hpp"

namespace gompsnr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// Independent route: direct center-minus-neighbour differences with
// explicit clamping, no kernel machinery.
Grid naive_channel(const Grid& phase, int dl, int dk) {
  Grid out(phase.rows(), phase.cols());
  auto clamp = [](long long i, std::size_t n) -> std::size_t {
    if (i < 0) return 0;
    if (i >= static_cast<long long>(n)) return n - 1;
    return static_cast<std::size_t>(i);
  };
  for (std::size_t l = 0; l < phase.rows(); ++l) {
    for (std::size_t k = 0; k < phase.cols(); ++k) {
      std::size_t nl = clamp(static_cast<long long>(l) + dl, phase.rows());
      std::size_t nk = clamp(static_cast<long long>(k) + dk, phase.cols());
      out(l, k) = phase(l, k) - phase(nl, nk);
    }
  }
  return out;
}

bool check_anti_wrap(std::mt19937_64& rng, std::string& detail) {
  for (int t = 0; t < 10000; ++t) {
    double x = uniform(rng, -10.0, 10.0);
    int m = static_cast<int>(uniform(rng, -5.0, 5.999));
    double a = anti_wrap(x);
    double b = anti_wrap(x + kTwoPi * m);
    if (std::fabs(a - b) > 1e-9 || a < 0.0 || a > std::numbers::pi) {
      std::ostringstream os;
      os << "x=" << x << " m=" << m << " f(x)=" << a << " f(x+2pim)=" << b;
      detail = os.str();
      return false;
    }
  }
  return true;
}

bool check_kernels(std::mt19937_64& rng, const KernelBank& bank,
                   std::string& detail) {
  constexpr int offsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                 {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  for (int i = 0; i < 9; ++i) {
    Kernel3 expect{};
    expect[4] = 1.0;
    if (i < 8) expect[(offsets[i][0] + 1) * 3 + (offsets[i][1] + 1)] = -1.0;
    if (bank.kernels[i] != expect) {
      detail = "kernel " + std::to_string(i) + " deviates from the fixed bank";
      return false;
    }
  }
  for (int t = 0; t < 20; ++t) {
    std::size_t rows = 2 + rng() % 7;
    std::size_t cols = 2 + rng() % 7;
    Grid phase(rows, cols);
    for (double& v : phase.data()) v = uniform(rng, -10.0, 10.0);
    DerivStack stack = omni_derivatives(phase, bank);
    for (int i = 0; i < 8; ++i) {
      Grid want = naive_channel(phase, offsets[i][0], offsets[i][1]);
      for (std::size_t j = 0; j < want.size(); ++j) {
        if (std::fabs(stack.channels[i].data()[j] - want.data()[j]) > 1e-12) {
          detail = "channel " + std::to_string(i) + " disagrees with the loop oracle";
          return false;
        }
      }
    }
    for (std::size_t j = 0; j < phase.size(); ++j) {
      if (stack.channels[8].data()[j] != phase.data()[j]) {
        detail = "identity channel does not reproduce the phase grid";
        return false;
      }
    }
  }
  return true;
}

bool check_denominator(std::mt19937_64& rng, std::string& detail) {
  for (int t = 0; t < 2000; ++t) {
    double mr = uniform(rng, 0.0, 3.0);
    double me = uniform(rng, 0.0, 3.0);
    Grid gr(1, 1, mr), ge(1, 1, me);
    DerivStack dr, de;
    for (int i = 0; i < 9; ++i) {
      dr.channels[i] = Grid(1, 1, uniform(rng, -20.0, 20.0));
      de.channels[i] = Grid(1, 1, uniform(rng, -20.0, 20.0));
    }
    double lower = (mr - me) * (mr - me);
    for (auto kind : {ComponentKind::ompsnr, ComponentKind::gompsnr}) {
      Grid c = correlation_component(kind, gr, ge, dr, de);
      double den = mr * mr + me * me + c(0, 0);
      double upper = kind == ComponentKind::gompsnr ? mr * mr + me * me
                                                     : (mr + me) * (mr + me);
      if (den < -1e-9 || den < lower - 1e-9 || den > upper + 1e-9) {
        std::ostringstream os;
        os << "denominator " << den << " outside [" << lower << ", " << upper
           << "]";
        detail = os.str();
        return false;
      }
    }
  }
  return true;
}

// At edge bins the replicate padding clamps some neighbours onto the center
// cell; those channels are identically zero for any input and stay frozen
// under perturbations, so the smoothness constraints skip them.
bool structurally_zero(int channel, std::size_t l, std::size_t k,
                       std::size_t rows, std::size_t cols) {
  constexpr int offsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                 {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  if (channel >= 8) return false;
  long long nl = static_cast<long long>(l) + offsets[channel][0];
  long long nk = static_cast<long long>(k) + offsets[channel][1];
  nl = std::clamp(nl, 0LL, static_cast<long long>(rows) - 1);
  nk = std::clamp(nk, 0LL, static_cast<long long>(cols) - 1);
  return nl == static_cast<long long>(l) && nk == static_cast<long long>(k);
}

// Random (mag, phase) pair with every non-smooth point at distance > margin:
// wrapped channel differences away from 0 and +-pi, magnitude gaps and
// cos/sin product gaps open.
struct SmoothInstance {
  MagPhase ref, est;
};

SmoothInstance sample_smooth(std::mt19937_64& rng, std::size_t rows,
                             std::size_t cols, double margin) {
  while (true) {
    SmoothInstance inst;
    inst.ref.mag = Grid(rows, cols);
    inst.ref.phase = Grid(rows, cols);
    inst.est.mag = Grid(rows, cols);
    inst.est.phase = Grid(rows, cols);
    for (std::size_t j = 0; j < rows * cols; ++j) {
      inst.ref.mag.data()[j] = uniform(rng, 0.2, 2.0);
      inst.est.mag.data()[j] = uniform(rng, 0.2, 2.0);
      inst.ref.phase.data()[j] = uniform(rng, -3.1, 3.1);
      inst.est.phase.data()[j] = uniform(rng, -3.1, 3.1);
    }
    DerivStack dr = omni_derivatives(inst.ref.phase);
    DerivStack de = omni_derivatives(inst.est.phase);
    bool ok = true;
    for (std::size_t l = 0; l < rows && ok; ++l) {
      for (std::size_t k = 0; k < cols && ok; ++k) {
        double mr = inst.ref.mag(l, k);
        double me = inst.est.mag(l, k);
        if (std::fabs(mr - me) < margin) ok = false;
        for (int i = 0; i < 9 && ok; ++i) {
          if (structurally_zero(i, l, k, rows, cols)) continue;
          double w = wrap_to_pi(dr.channels[i](l, k) - de.channels[i](l, k));
          if (std::fabs(w) < margin || std::fabs(w) > std::numbers::pi - margin) {
            ok = false;
          }
          double gr = wrap_to_pi(dr.channels[i](l, k));
          double ge = wrap_to_pi(de.channels[i](l, k));
          if (std::fabs(mr * std::cos(gr) - me * std::cos(ge)) < margin ||
              std::fabs(mr * std::sin(gr) - me * std::sin(ge)) < margin) {
            ok = false;
          }
        }
      }
    }
    if (ok) return inst;
  }
}

bool check_gradients(std::mt19937_64& rng, std::string& detail) {
  const double step = 1e-5;
  const double tol = 1e-4;
  struct Case {
    LossKind kind;
    Distance dist;
    const char* name;
  };
  const Case cases[] = {
      {LossKind::op, Distance::l1, "op"},
      {LossKind::wop, Distance::l1, "wop"},
      {LossKind::ori, Distance::l1, "ori/l1"},
      {LossKind::ori, Distance::l2, "ori/l2"},
      {LossKind::cori, Distance::l1, "cori/l1"},
      {LossKind::cori, Distance::l2, "cori/l2"},
  };
  for (const Case& c : cases) {
    SmoothInstance inst = sample_smooth(rng, 4, 4, 5e-3);
    LossResult res = evaluate_loss(c.kind, c.dist, inst.ref, inst.est, true);
    auto value_at = [&](const MagPhase& est) {
      return evaluate_loss(c.kind, c.dist, inst.ref, est, false).value;
    };
    auto check_grid = [&](const Grid& analytic, bool is_mag) {
      for (std::size_t j = 0; j < analytic.size(); ++j) {
        MagPhase hi = inst.est, lo = inst.est;
        auto& hv = is_mag ? hi.mag : hi.phase;
        auto& lv = is_mag ? lo.mag : lo.phase;
        hv.data()[j] += step;
        lv.data()[j] -= step;
        double fd = (value_at(hi) - value_at(lo)) / (2.0 * step);
        double a = analytic.data()[j];
        double rel = std::fabs(a - fd) / std::max({std::fabs(a), std::fabs(fd), 1e-6});
        if (rel > tol) {
          std::ostringstream os;
          os << c.name << (is_mag ? " mag" : " phase") << " grad[" << j
             << "]: analytic " << a << " vs fd " << fd;
          detail = os.str();
          return false;
        }
      }
      return true;
    };
    if (res.grad_phase_est && !check_grid(*res.grad_phase_est, false)) return false;
    if (res.grad_mag_est && !check_grid(*res.grad_mag_est, true)) return false;
  }
  return true;
}

}  // namespace

bool SelfcheckResult::all_passed() const {
  for (const auto& g : groups) {
    if (!g.passed) return false;
  }
  return true;
}

SelfcheckResult run_selfcheck(const SelfcheckOptions& options) {
  const KernelBank& bank = options.kernels ? *options.kernels : omni_kernels();
  SelfcheckResult result;
  auto run = [&](const char* name, auto&& fn) {
    std::mt19937_64 rng(options.seed);
    SelfcheckGroup g;
    g.name = name;
    g.passed = fn(rng, g.detail);
    result.groups.push_back(std::move(g));
  };
  run("anti_wrap", [](std::mt19937_64& rng, std::string& d) {
    return check_anti_wrap(rng, d);
  });
  run("kernel_bank", [&](std::mt19937_64& rng, std::string& d) {
    return check_kernels(rng, bank, d);
  });
  run("denominator", [](std::mt19937_64& rng, std::string& d) {
    return check_denominator(rng, d);
  });
  run("gradients", [](std::mt19937_64& rng, std::string& d) {
    return check_gradients(rng, d);
  });
  return result;
}

}  // namespace gompsnr
