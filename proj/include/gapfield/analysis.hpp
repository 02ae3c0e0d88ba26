#pragma once

// Sweeps and scalar diagnostics: thread-parallel index loops, log-log
// regression, the standard sample grid for sup |grad u_b|, and per-value
// sweep rows.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "gapfield/singular.hpp"

namespace gapfield {

// Worker count: GAPFIELD_THREADS if set to a positive integer, else the
// hardware concurrency.
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GAPFIELD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

// Runs fn(i) for i in [0, n) on up to thread_count() threads. Results must
// be written by index; the first exception thrown is rethrown after join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = thread_count()) {
  threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!first) first = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

// Least squares for log|y| = slope log x + intercept.
inline LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_fit: need at least two paired samples");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(std::abs(y[i]) > 0)) throw DomainError("loglog_fit: samples must be nonzero and x positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::abs(y[i]));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) throw DomainError("loglog_fit: x values are all equal");
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

// Sample set used for sup |grad u_b|: both boundaries from the exterior side
// (n_theta each), the segment between the closest points, and the exterior
// part of an n_box x n_box grid covering both disks.
inline std::vector<SamplePoint> decomposition_grid(const DiskPairGeometry& g, int n_theta = 128, int n_box = 24) {
  std::vector<SamplePoint> out = boundary_samples(g, 1, n_theta);
  const auto b2 = boundary_samples(g, 2, n_theta);
  out.insert(out.end(), b2.begin(), b2.end());
  const double a = g.closest_point(1).x, b = g.closest_point(2).x;
  for (int i = 1; i < 16; ++i) out.push_back(sample_at({a + (b - a) * i / 16.0, 0.0}, g));
  const double x0 = g.disk1().center.x - 2 * g.r1(), x1 = g.disk2().center.x + 2 * g.r2();
  const double h = 2 * std::max(g.r1(), g.r2());
  for (int i = 0; i < n_box; ++i) {
    for (int k = 0; k < n_box; ++k) {
      const CartesianPoint pt{x0 + (x1 - x0) * (i + 0.5) / n_box, -h + 2 * h * (k + 0.5) / n_box};
      if (classify_region(pt, g) == Region::Exterior) out.push_back(sample_at(pt, g));
    }
  }
  return out;
}

// |grad u| at the closest point x_j, exterior side.
inline double closest_point_gradient(const TransmissionSolver& s, int j = 1) {
  return s.on_boundary(j, 0.0).grad.norm();
}

// max over a theta grid on boundary j of |grad(u_a - u_b)|, exterior side.
inline double boundary_gradient_gap(const TransmissionSolver& a, const TransmissionSolver& b, int j,
                                    std::span<const double> thetas) {
  double m = 0;
  for (double th : thetas) m = std::max(m, (a.on_boundary(j, th).grad - b.on_boundary(j, th).grad).norm());
  return m;
}

struct SweepRow {
  double param = 0;
  double eps = 0;
  ConductivityPair c = perfect_pair();
  double beta = 0;
  double grad_x1 = 0;
  std::optional<double> sup_grad_ub;  // both conductivities on the same side of 1
  std::optional<double> gap_x1;       // |d(u_k - u_inf)/dnu| at x1; k1 = k2 > 1, H = x
  std::optional<double> gap_sup;      // max |grad(u_k - u_inf)| on boundary 1
};

inline bool decomposition_applies(const ConductivityPair& c) {
  return c.tau1() * c.tau2() > 0;
}

inline bool infinity_gap_applies(const ConductivityPair& c, const HarmonicDrive& d) {
  return c.finite() && c.k1.value() == c.k2.value() && c.k1.value() > 1 && d.hy == 0.0 && d.hx != 0.0;
}

inline SweepRow sweep_row(double param, double r1, double r2, double eps, const ConductivityPair& c,
                          const HarmonicDrive& d, double tol, int n_theta = 128) {
  const DiskPairGeometry g = build_geometry(r1, r2, eps);
  SweepRow row;
  row.param = param;
  row.eps = eps;
  row.c = c;
  const TransmissionSolver s(g, c, d, tol);
  row.grad_x1 = closest_point_gradient(s, 1);
  const SingularParams p = make_params(g, c, d);
  row.beta = p.beta;
  if (decomposition_applies(c)) {
    const auto grid = decomposition_grid(g, n_theta);
    row.sup_grad_ub = decompose(grid, g, c, d, tol).sup_grad_ub;
  }
  if (infinity_gap_applies(c, d)) {
    const auto th = theta_grid(n_theta);
    const double zero[] = {0.0};
    const InfinityGap at_x1 = infinity_gap(g, c.k1.value(), zero, 1, tol);
    row.gap_x1 = std::abs(at_x1.gap_normal[0]);
    const TransmissionSolver perfect = perfect_conductor_solver(g, d, tol);
    row.gap_sup = boundary_gradient_gap(s, perfect, 1, th);
  }
  return row;
}

}  // namespace gapfield
