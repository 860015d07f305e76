#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "gompsnr/error.hpp"
#include "gompsnr/stats.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace gompsnr;
using testutil::Rng;

TEST_CASE("pcc basics") {
  std::vector<double> x{1, 2, 3, 4};
  std::vector<double> y{-1, -2, -3, -4};
  CHECK(pcc(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pcc(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pcc error paths") {
  std::vector<double> x{1, 2, 3};
  std::vector<double> constant{5, 5, 5};
  std::vector<double> shorter{1, 2};
  CHECK_THROWS_AS(pcc(x, constant), Error);
  CHECK_THROWS_AS(pcc(shorter, shorter), Error);
  CHECK_THROWS_AS(pcc(x, shorter), Error);
  std::vector<double> with_inf{1, std::numeric_limits<double>::infinity(), 3};
  CHECK_THROWS_AS(pcc(x, with_inf), Error);
}

TEST_CASE("pcc matches the direct formula oracle") {
  Rng rng(91);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(100), y(100);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform(-5.0, 5.0);
      y[i] = 0.4 * x[i] + rng.uniform(-2.0, 2.0);
    }
    CHECK(std::fabs(pcc(x, y) - oracle::naive_pcc(x, y)) <= 1e-12);
  }
}

TEST_CASE("pcc invariance under positive affine maps") {
  Rng rng(92);
  std::vector<double> x(64), y(64);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(-3.0, 3.0);
    y[i] = rng.uniform(-3.0, 3.0);
  }
  std::vector<double> xs(x);
  for (double& v : xs) v = 2.5 * v + 7.0;
  CHECK(std::fabs(pcc(x, y) - pcc(xs, y)) <= 1e-12);
  CHECK(std::fabs(pcc(x, y) - pcc(y, x)) <= 1e-15);
}

TEST_CASE("srcc is exact on monotone transforms") {
  std::vector<double> x{0.1, 0.7, 1.3, 2.0, 3.5, 4.1};
  std::vector<double> y(x);
  for (double& v : y) v = std::exp(v);
  CHECK(srcc(x, y) == 1.0);

  std::vector<double> rev(x.rbegin(), x.rend());
  CHECK(srcc(x, rev) == -1.0);
}

TEST_CASE("fractional ranks average over ties") {
  std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  auto r = fractional_ranks(v);
  CHECK(r[0] == 3.5);
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 3.5);
  CHECK(r[3] == 2.0);
}

TEST_CASE("srcc matches the brute-force rank oracle with ties") {
  Rng rng(93);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(40), y(40);
    for (std::size_t i = 0; i < x.size(); ++i) {
      // coarse quantization forces ties
      x[i] = std::round(rng.uniform(-4.0, 4.0));
      y[i] = std::round(rng.uniform(-4.0, 4.0));
    }
    // ensure non-constant
    x[0] = -10.0;
    x[1] = 10.0;
    y[0] = 10.0;
    y[1] = -10.0;
    CHECK(std::fabs(srcc(x, y) - oracle::naive_srcc(x, y)) <= 1e-12);
  }
}

TEST_CASE("srcc invariance under strictly increasing transforms") {
  Rng rng(94);
  std::vector<double> x(50), y(50);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(-2.0, 2.0);
    y[i] = rng.uniform(-2.0, 2.0);
  }
  std::vector<double> xt(x);
  for (double& v : xt) v = v * v * v + 2.0 * v;  // strictly increasing
  CHECK(srcc(x, y) == srcc(xt, y));
}

TEST_CASE("correlation matrix over a score table") {
  ScoreTable t;
  t.metric_names = {"a", "b", "c"};
  Rng rng(95);
  for (int i = 0; i < 50; ++i) {
    ScoreTable::Row row;
    row.id = "u" + std::to_string(i);
    double a = rng.uniform(-1.0, 1.0);
    row.values = {a, a, rng.uniform(-1.0, 1.0)};  // b duplicates a
    t.rows.push_back(row);
  }
  CorrelationMatrix m = correlation_matrix(t, {"a", "b", "c"});
  CHECK(m.n_samples == 50);
  CHECK(m.n_dropped == 0);
  CHECK(m.pcc(0, 0) == 1.0);
  CHECK(m.srcc(2, 2) == 1.0);
  CHECK(m.pcc(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.srcc(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.pcc(0, 2) == m.pcc(2, 0));
  CHECK(std::fabs(m.pcc(0, 2)) <= 1.0 + 1e-12);

  // matches per-pair calls
  std::vector<double> a, c;
  for (const auto& row : t.rows) {
    a.push_back(row.values[0]);
    c.push_back(row.values[2]);
  }
  CHECK(std::fabs(m.pcc(0, 2) - pcc(a, c)) <= 1e-15);
  CHECK(std::fabs(m.srcc(0, 2) - srcc(a, c)) <= 1e-15);
}

TEST_CASE("rows with inf or missing values are dropped") {
  ScoreTable t;
  t.metric_names = {"a", "b"};
  auto add = [&](double a, double b) {
    ScoreTable::Row row;
    row.id = "r" + std::to_string(t.rows.size());
    row.values = {a, b};
    t.rows.push_back(row);
  };
  add(1.0, 2.0);
  add(std::numeric_limits<double>::infinity(), 1.0);
  add(2.0, 1.0);
  // only 2 usable rows -> too few
  CHECK_THROWS_AS(correlation_matrix(t, {"a", "b"}), Error);

  add(3.0, 5.0);
  add(4.0, 4.0);
  CorrelationMatrix m = correlation_matrix(t, {"a", "b"});
  CHECK(m.n_samples == 4);
  CHECK(m.n_dropped == 1);
}

TEST_CASE("unknown metric is rejected") {
  ScoreTable t;
  t.metric_names = {"a"};
  for (int i = 0; i < 3; ++i) {
    t.rows.push_back({"r" + std::to_string(i), {static_cast<double>(i)}});
  }
  CHECK_THROWS_AS(correlation_matrix(t, {"nope"}), Error);
}
