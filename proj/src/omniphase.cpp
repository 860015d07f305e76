#include "gompsnr/omniphase.hpp"

#include <cmath>
#include <numbers>

namespace gompsnr {

namespace {

KernelBank make_bank() {
  KernelBank bank{};
  // Neighbour offsets in row-major (time-major) order; kernel i is +1 at the
  // center and -1 at neighbour i.
  constexpr int offsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                 {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  for (int i = 0; i < 8; ++i) {
    Kernel3 k{};
    k[4] = 1.0;  // center of the 3x3 grid
    k[(offsets[i][0] + 1) * 3 + (offsets[i][1] + 1)] = -1.0;
    bank.kernels[i] = k;
  }
  Kernel3 identity{};
  identity[4] = 1.0;
  bank.kernels[8] = identity;
  return bank;
}

inline std::size_t clamp_index(long long i, std::size_t n) {
  if (i < 0) return 0;
  if (i >= static_cast<long long>(n)) return n - 1;
  return static_cast<std::size_t>(i);
}

}  // namespace

const KernelBank& omni_kernels() {
  static const KernelBank bank = make_bank();
  return bank;
}

Grid correlate3_replicate(const Grid& src, const Kernel3& k) {
  const std::size_t rows = src.rows(), cols = src.cols();
  Grid out(rows, cols);
  for (std::size_t l = 0; l < rows; ++l) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int u = 0; u < 3; ++u) {
        for (int v = 0; v < 3; ++v) {
          double w = k[u * 3 + v];
          if (w == 0.0) continue;
          std::size_t sl = clamp_index(static_cast<long long>(l) + u - 1, rows);
          std::size_t sc = clamp_index(static_cast<long long>(c) + v - 1, cols);
          acc += w * src(sl, sc);
        }
      }
      out(l, c) = acc;
    }
  }
  return out;
}

Grid correlate3_replicate_adjoint(const Grid& g, const Kernel3& k) {
  const std::size_t rows = g.rows(), cols = g.cols();
  Grid out(rows, cols);
  for (std::size_t l = 0; l < rows; ++l) {
    for (std::size_t c = 0; c < cols; ++c) {
      double gv = g(l, c);
      if (gv == 0.0) continue;
      for (int u = 0; u < 3; ++u) {
        for (int v = 0; v < 3; ++v) {
          double w = k[u * 3 + v];
          if (w == 0.0) continue;
          std::size_t sl = clamp_index(static_cast<long long>(l) + u - 1, rows);
          std::size_t sc = clamp_index(static_cast<long long>(c) + v - 1, cols);
          out(sl, sc) += w * gv;
        }
      }
    }
  }
  return out;
}

DerivStack omni_derivatives(const Grid& phase) {
  return omni_derivatives(phase, omni_kernels());
}

DerivStack omni_derivatives(const Grid& phase, const KernelBank& bank) {
  DerivStack stack;
  for (std::size_t i = 0; i < 9; ++i) {
    stack.channels[i] = correlate3_replicate(phase, bank.kernels[i]);
  }
  return stack;
}

double wrap_to_pi(double x) {
  // IEEE remainder is exact, so the reduction itself introduces no rounding;
  // 2*pi-integer shifts of x that are exact in double stay exact here.
  return std::remainder(x, 2.0 * std::numbers::pi);
}

double anti_wrap(double x) { return std::fabs(wrap_to_pi(x)); }

Grid anti_wrap(const Grid& g) {
  Grid out(g.rows(), g.cols());
  auto src = g.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = anti_wrap(src[i]);
  return out;
}

}  // namespace gompsnr
