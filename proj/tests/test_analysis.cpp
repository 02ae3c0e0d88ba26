#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "gapfield/analysis.hpp"

using namespace gapfield;

TEST(LogLog, ExactPowerLaw) {
  const std::vector<double> x{1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<double> y;
  for (double v : x) y.push_back(-3.0 * std::pow(v, -0.5));
  const auto f = loglog_fit(x, y);
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(LogLog, Errors) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(loglog_fit(one, one), DomainError);
  const std::vector<double> x{1.0, 2.0}, y{0.0, 1.0}, same{2.0, 2.0};
  EXPECT_THROW(loglog_fit(x, y), DomainError);
  EXPECT_THROW(loglog_fit(same, x), DomainError);
}

TEST(Parallel, WritesByIndex) {
  std::vector<std::size_t> out(1000);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = i * i; }, 4);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
}

TEST(Parallel, RethrowsFirstException) {
  std::atomic<int> calls{0};
  EXPECT_THROW(parallel_for(
                   100,
                   [&](std::size_t i) {
                     ++calls;
                     if (i == 37) throw std::runtime_error("boom");
                   },
                   3),
               std::runtime_error);
  EXPECT_GT(calls.load(), 0);
}

TEST(Parallel, ThreadCountFromEnvironment) {
  setenv("GAPFIELD_THREADS", "3", 1);
  EXPECT_EQ(thread_count(), 3u);
  setenv("GAPFIELD_THREADS", "zero", 1);
  EXPECT_GE(thread_count(), 1u);
  unsetenv("GAPFIELD_THREADS");
}

TEST(Grid, DecompositionGridAvoidsInclusions) {
  const auto g = build_geometry(3, 2, 0.01);
  const auto grid = decomposition_grid(g, 32, 10);
  EXPECT_GT(grid.size(), 64u);
  for (const auto& s : grid) {
    EXPECT_EQ(s.side, Side::Exterior);
    const auto r = classify_region(to_cartesian(s.bp, g), g);
    EXPECT_NE(r, Region::Interior1);
    EXPECT_NE(r, Region::Interior2);
  }
}

TEST(Grid, ThetaGridExcludesEnds) {
  const auto t = theta_grid(512);
  ASSERT_EQ(t.size(), 512u);
  EXPECT_GT(t.front(), -std::numbers::pi);
  EXPECT_LT(t.back(), std::numbers::pi);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GT(t[i], t[i - 1]);
}

TEST(Sweep, RowContents) {
  const auto row = sweep_row(0.01, 3, 2, 0.01, finite_pair(100, 100), {1, 0}, 1e-10, 32);
  EXPECT_TRUE(row.sup_grad_ub.has_value());
  EXPECT_TRUE(row.gap_x1.has_value());
  EXPECT_TRUE(row.gap_sup.has_value());
  EXPECT_GT(row.grad_x1, 1.0);
  const auto mixed = sweep_row(0.01, 3, 2, 0.01, finite_pair(100, 0.5), {1, 0}, 1e-10, 32);
  EXPECT_FALSE(mixed.sup_grad_ub.has_value());
  EXPECT_FALSE(mixed.gap_x1.has_value());
}

TEST(Sweep, PerfectConductorBlowUpRate) {
  std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5}, grad;
  for (double e : eps)
    grad.push_back(closest_point_gradient(perfect_conductor_solver(build_geometry(3, 2, e), {1, 0})));
  EXPECT_NEAR(loglog_fit(eps, grad).slope, -0.5, 0.03);
}
