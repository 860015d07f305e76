#include "gompsnr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gompsnr/error.hpp"
#include "gompsnr/numeric.hpp"

namespace gompsnr {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    raise(Errc::length_mismatch, "correlation inputs differ in length");
  }
  if (x.size() < 3) raise(Errc::too_few, "need at least 3 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      raise(Errc::invalid_input, "correlation inputs must be finite");
    }
  }
}

}  // namespace

double pcc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double n = static_cast<double>(x.size());
  KahanSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  KahanSum sxx, syy, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxx.add(dx * dx);
    syy.add(dy * dy);
    sxy.add(dx * dy);
  }
  if (sxx.value() <= 0.0 || syy.value() <= 0.0) {
    raise(Errc::constant_input, "correlation input is constant");
  }
  return sxy.value() / (std::sqrt(sxx.value()) * std::sqrt(syy.value()));
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    // 1-based positions i+1 .. j+1 share the average rank
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double srcc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  auto rx = fractional_ranks(x);
  auto ry = fractional_ranks(y);
  return pcc(rx, ry);
}

CorrelationMatrix correlation_matrix(const ScoreTable& table,
                                     const std::vector<std::string>& targets) {
  if (targets.empty()) raise(Errc::unknown_metric, "no metrics requested");
  std::vector<std::size_t> cols;
  for (const auto& t : targets) {
    auto it = std::find(table.metric_names.begin(), table.metric_names.end(), t);
    if (it == table.metric_names.end()) {
      raise(Errc::unknown_metric, "metric '" + t + "' not in score table");
    }
    cols.push_back(static_cast<std::size_t>(it - table.metric_names.begin()));
  }

  // Drop rows with an inf or missing value in any requested column.
  std::vector<std::vector<double>> series(targets.size());
  std::size_t dropped = 0;
  for (const auto& row : table.rows) {
    bool ok = true;
    for (std::size_t c : cols) {
      if (!std::isfinite(row.values[c])) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    for (std::size_t t = 0; t < cols.size(); ++t) {
      series[t].push_back(row.values[cols[t]]);
    }
  }

  const std::size_t n = series.empty() ? 0 : series[0].size();
  if (n < 3) {
    raise(Errc::too_few, "only " + std::to_string(n) +
                             " usable rows after dropping " +
                             std::to_string(dropped));
  }

  CorrelationMatrix m;
  m.metric_names = targets;
  m.n_samples = n;
  m.n_dropped = dropped;
  m.pcc = Grid(targets.size(), targets.size(), 1.0);
  m.srcc = Grid(targets.size(), targets.size(), 1.0);
  for (std::size_t a = 0; a < targets.size(); ++a) {
    for (std::size_t b = a + 1; b < targets.size(); ++b) {
      double p = pcc(series[a], series[b]);
      double s = srcc(series[a], series[b]);
      m.pcc(a, b) = m.pcc(b, a) = p;
      m.srcc(a, b) = m.srcc(b, a) = s;
    }
  }
  return m;
}

}  // namespace gompsnr
