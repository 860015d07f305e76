#pragma once

namespace gompsnr {

// Kahan compensated accumulator. Metric grids reach ~1e6 bins for 10 s of
// audio; compensation keeps the sums tight against long-double oracles.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }

  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace gompsnr
