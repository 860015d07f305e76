#pragma once

#include <array>
#include <cstddef>

#include "gompsnr/grid.hpp"

namespace gompsnr {

// 3x3 correlation kernel, row-major.
using Kernel3 = std::array<double, 9>;

// Nine fixed kernels. Kernels 0..7 take center-minus-neighbour differences;
// the neighbour offsets (dl, dk) run over {-1,0,1}^2 \ {(0,0)} in row-major
// (time-major) order:
//   0:(-1,-1) 1:(-1,0) 2:(-1,+1) 3:(0,-1) 4:(0,+1) 5:(+1,-1) 6:(+1,0) 7:(+1,+1)
// Kernel 8 is the identity and reproduces the instantaneous phase. The
// ordering is fixed so serialized gradients stay reproducible.
struct KernelBank {
  std::array<Kernel3, 9> kernels;
};

const KernelBank& omni_kernels();

// Nine-channel stack of omnidirectional phase derivatives, channel i being
// the correlation of the phase grid with kernel i.
struct DerivStack {
  std::array<Grid, 9> channels;

  std::size_t rows() const { return channels[0].rows(); }
  std::size_t cols() const { return channels[0].cols(); }
};

// 2-D correlation under replicate (edge-clamp) padding; output keeps the
// input's L x K shape. Zero padding would inject fake phase boundaries.
Grid correlate3_replicate(const Grid& src, const Kernel3& k);

// Transpose of correlate3_replicate: taps that were clamped to an edge cell
// accumulate back into that cell.
Grid correlate3_replicate_adjoint(const Grid& g, const Kernel3& k);

DerivStack omni_derivatives(const Grid& phase);
DerivStack omni_derivatives(const Grid& phase, const KernelBank& bank);

// x - 2*pi*round(x/(2*pi)), evaluated as an exact IEEE remainder in
// [-pi, pi]. Half-way quotients round to even instead of away from zero;
// the two candidates differ only in sign, so every downstream consumer
// (|.|, cos, sin-pairs) sees the same value.
double wrap_to_pi(double x);

// Anti-wrapping distance f(x) = |x - 2*pi*round(x/(2*pi))|, in [0, pi].
double anti_wrap(double x);
Grid anti_wrap(const Grid& g);

}  // namespace gompsnr
