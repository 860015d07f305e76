#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gompsnr/grid.hpp"
#include "gompsnr/report.hpp"

namespace gompsnr {

// Sample Pearson correlation, two-pass mean-centered. Requires n >= 3,
// finite values and non-constant sequences.
double pcc(std::span<const double> x, std::span<const double> y);

// 1-based ranks; ties receive the average (fractional) rank.
std::vector<double> fractional_ranks(std::span<const double> x);

// Spearman rank correlation: Pearson over fractional ranks.
double srcc(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> metric_names;
  Grid pcc, srcc;             // symmetric, unit diagonal
  std::size_t n_samples = 0;  // rows surviving the inf/missing drop
  std::size_t n_dropped = 0;
};

// Pairwise correlations over the requested metric columns. Rows with an
// infinite or missing value in any requested column are dropped first;
// fewer than 3 surviving rows is an error.
CorrelationMatrix correlation_matrix(const ScoreTable& table,
                                     const std::vector<std::string>& targets);

}  // namespace gompsnr
