#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gompsnr {

// Dense row-major L x K matrix of doubles. Rows index STFT frames (time),
// columns index frequency bins.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  double& operator()(std::size_t l, std::size_t k) { return v_[l * cols_ + k]; }
  double operator()(std::size_t l, std::size_t k) const { return v_[l * cols_ + k]; }

  std::span<double> data() { return v_; }
  std::span<const double> data() const { return v_; }

  bool same_shape(const Grid& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> v_;
};

}  // namespace gompsnr
