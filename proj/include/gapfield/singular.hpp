#pragma once

// Singular function q built from L(.; beta), its gradient, and the
// quantities that compare it with the exact series solution: the residual
// u_b = u - c Re q - H (or c Im q for insulating inclusions), boundary
// profiles of the normal/tangential derivatives, and the gap between the
// finite-conductivity and perfect-conductor solutions.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "gapfield/errors.hpp"
#include "gapfield/geometry.hpp"
#include "gapfield/lerch.hpp"
#include "gapfield/series.hpp"

namespace gapfield {

enum class Regime {
  Conducting,  // k1, k2 > 1: u = c_n Re q(beta, tau1, tau2) + H + u_b
  Insulating,  // k1, k2 < 1: u = c_t Im q(beta, -tau1, -tau2) + H + u_b
  Mixed,       // one of each; q is evaluable but no decomposition is claimed
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Conducting: return "conducting";
    case Regime::Insulating: return "insulating";
    case Regime::Mixed: return "mixed";
  }
  return "?";
}

struct SingularParams {
  double beta = 0;
  // contrasts entering q (already negated in the insulating regime)
  double tau1 = 1, tau2 = 1, tau = 1;
  double c_n = 0, c_t = 0;
  Complex c_q{};  // limit of q at infinity
  Regime regime = Regime::Conducting;
  bool outside_theorem = false;

  double amplitude() const { return regime == Regime::Insulating ? c_t : c_n; }
};

inline double beta_parameter(const DiskPairGeometry& g, double tau) {
  const double abs_tau = std::abs(tau);
  if (abs_tau == 1.0) return 0.0;
  return g.r_star() * (-std::log(abs_tau)) / (4 * std::sqrt(g.eps()));
}

inline SingularParams make_params(const DiskPairGeometry& g, const ConductivityPair& c, const HarmonicDrive& d,
                                  const EvalBudget& budget = {1e-12, 50'000'000}) {
  SingularParams p;
  const double t1 = c.tau1(), t2 = c.tau2();
  if (t1 > 0 && t2 > 0) {
    p.regime = Regime::Conducting;
    p.tau1 = t1;
    p.tau2 = t2;
  } else if (t1 < 0 && t2 < 0) {
    p.regime = Regime::Insulating;
    p.tau1 = -t1;
    p.tau2 = -t2;
  } else {
    p.regime = Regime::Mixed;
    p.outside_theorem = true;
    p.tau1 = t1;
    p.tau2 = t2;
  }
  p.tau = p.tau1 * p.tau2;
  p.beta = beta_parameter(g, p.tau);
  const double rs2 = g.r_star() * g.r_star();
  p.c_n = rs2 * (d.hx * g.unit_normal().x + d.hy * g.unit_normal().y);
  p.c_t = rs2 * (d.hx * g.unit_tangent().x + d.hy * g.unit_tangent().y);
  const Complex l1 = cap_L(-std::exp(-2 * g.xi1()), p.beta, budget);
  const Complex l2 = cap_L(-std::exp(-2 * g.xi2()), p.beta, budget);
  p.c_q = 0.5 * ((p.tau1 + p.tau) * l1 - (p.tau2 + p.tau) * l2);
  return p;
}

struct SingularValue {
  Complex q;
  Complex q_xi;
  Complex q_theta;
  Vec2 grad_re;
  Vec2 grad_im;
};

inline SingularValue evaluate_q(const BipolarPoint& bp, Side side, const DiskPairGeometry& g,
                                const SingularParams& p, const EvalBudget& budget = {1e-12, 50'000'000}) {
  const double xi = bp.xi, th = bp.theta;
  const double w1 = p.tau1 + p.tau, w2 = p.tau2 + p.tau;
  const Complex w(xi, th);
  auto lp = [&](Complex z) {
    if (!(std::abs(z) < 1)) throw EvaluationError("evaluate_q: Lerch argument left the unit disk", std::abs(z), 0);
    return std::pair{cap_L(z, p.beta, budget), cap_P(z, p.beta, budget)};
  };
  SingularValue out{};
  switch (side) {
    case Side::Interior1: {
      const auto [l1, p1] = lp(std::exp(std::conj(w)));
      const auto [l2, p2] = lp(std::exp(w - 2 * g.xi2()));
      out.q = 0.5 * (w1 * l1 - w2 * l2);
      out.q_xi = 0.5 * (-w1 * p1 + w2 * p2);
      out.q_theta = Complex(0, 0.5) * (w1 * p1 + w2 * p2);
      break;
    }
    case Side::Interior2: {
      const auto [l1, p1] = lp(std::exp(-w - 2 * g.xi1()));
      const auto [l2, p2] = lp(std::exp(-std::conj(w)));
      out.q = 0.5 * (w1 * l1 - w2 * l2);
      out.q_xi = 0.5 * (w1 * p1 - w2 * p2);
      out.q_theta = Complex(0, 0.5) * (w1 * p1 + w2 * p2);
      break;
    }
    default: {
      const auto [l1, p1] = lp(std::exp(-w - 2 * g.xi1()));
      const auto [l2, p2] = lp(std::exp(w - 2 * g.xi2()));
      out.q = 0.5 * (w1 * l1 - w2 * l2);
      out.q_xi = 0.5 * (w1 * p1 + w2 * p2);
      out.q_theta = Complex(0, 0.5) * (w1 * p1 + w2 * p2);
      break;
    }
  }
  out.grad_re = cartesian_gradient(out.q_xi.real(), out.q_theta.real(), bp, g).grad;
  out.grad_im = cartesian_gradient(out.q_xi.imag(), out.q_theta.imag(), bp, g).grad;
  return out;
}

inline SingularValue evaluate_q(CartesianPoint pt, const DiskPairGeometry& g, const SingularParams& p,
                                const EvalBudget& budget = {1e-12, 50'000'000}) {
  return evaluate_q(to_bipolar(pt, g), side_for(classify_region(pt, g)), g, p, budget);
}

// A field point together with the series branch used there.
struct SamplePoint {
  BipolarPoint bp;
  Side side;
};

inline SamplePoint sample_at(CartesianPoint pt, const DiskPairGeometry& g) {
  return {to_bipolar(pt, g), side_for(classify_region(pt, g))};
}

// Samples on boundary j at n uniformly spaced angles in (-pi, pi), taken on
// the exterior side, the interior side, or both.
inline std::vector<SamplePoint> boundary_samples(const DiskPairGeometry& g, int j, int n, bool exterior = true,
                                                 bool interior = false) {
  std::vector<SamplePoint> out;
  const Side in = j == 1 ? Side::Interior1 : Side::Interior2;
  for (int i = 0; i < n; ++i) {
    const double th = -std::numbers::pi + 2 * std::numbers::pi * (i + 0.5) / n;
    if (exterior) out.push_back({{g.boundary_level(j), th}, Side::Exterior});
    if (interior) out.push_back({{g.boundary_level(j), th}, in});
  }
  return out;
}

// Default theta grid: n uniform points in (-pi, pi), excluding both ends.
inline std::vector<double> theta_grid(int n = 512) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = -std::numbers::pi + 2 * std::numbers::pi * (i + 0.5) / n;
  return t;
}

struct ResidualSample {
  SamplePoint at;
  double u_b;
  Vec2 grad_u_b;
};

struct Decomposition {
  SingularParams params;
  double sup_grad_ub = 0;
  std::vector<ResidualSample> samples;
};

// Singular part c Re q (conducting) or c Im q (insulating) and its gradient.
inline std::pair<double, Vec2> singular_part(const SingularValue& s, const SingularParams& p) {
  if (p.regime == Regime::Insulating) return {p.c_t * s.q.imag(), p.c_t * s.grad_im};
  return {p.c_n * s.q.real(), p.c_n * s.grad_re};
}

inline Decomposition decompose(std::span<const SamplePoint> grid, const DiskPairGeometry& g,
                               const ConductivityPair& c, const HarmonicDrive& d, double tol = 1e-10) {
  Decomposition out;
  out.params = make_params(g, c, d);
  if (out.params.regime == Regime::Mixed)
    throw DomainError("decompose: conductivities on both sides of 1 have no bounded decomposition");
  const TransmissionSolver solver(g, c, d, tol);
  out.samples.reserve(grid.size());
  for (const SamplePoint& s : grid) {
    const FieldValue f = solver.at(s.bp, s.side);
    const SingularValue q = evaluate_q(s.bp, s.side, g, out.params);
    const auto [sing, sing_grad] = singular_part(q, out.params);
    const CartesianPoint pt = to_cartesian(s.bp, g);
    const double h = d.hx * pt.x + d.hy * pt.y;
    const Vec2 grad = f.grad - sing_grad - Vec2{d.hx, d.hy};
    out.samples.push_back({s, f.u - sing - h, grad});
    out.sup_grad_ub = std::max(out.sup_grad_ub, grad.norm());
  }
  return out;
}

struct BoundaryProfile {
  int j = 1;
  std::vector<double> thetas;
  std::vector<double> exact_normal;        // d(u - H)/dnu, exterior side
  std::vector<double> exact_tangential;    // d(u - H)/dT, exterior side
  std::vector<double> exact_grad_norm;     // |grad(u - H)|, exterior side
  std::vector<double> singular_normal;     // normal derivative of the singular part
  std::vector<double> singular_tangential; // tangential derivative of the singular part
  std::vector<double> q_profile;           // Q_j(theta)
  std::vector<double> corollary;           // predicted |grad(u - H)| from Q
  std::vector<double> asymptotic;          // Q_j with P replaced by its extreme-beta form
};

// Q_j(theta) = s_j (c / r*) (|tau1| + |tau2| + 2 tau) (cosh xi_j + cos theta) / (2 sqrt(eps))
//              * Re P(e^{-(xi_j + i theta)}; beta),
// with s_j = +1 on boundary 1 and -1 on boundary 2 (outward normal orientation).
inline double q_prefactor(const DiskPairGeometry& g, const SingularParams& p, int j, double theta) {
  const double xij = j == 1 ? g.xi1() : g.xi2();
  const double sj = j == 1 ? 1.0 : -1.0;
  return sj * (p.amplitude() / g.r_star()) * (std::abs(p.tau1) + std::abs(p.tau2) + 2 * p.tau) *
         metric_denominator({xij, theta}) / (2 * std::sqrt(g.eps()));
}

// Elementary form of Re P(e^{-(xi + i theta)}; beta):
//   beta <= 1: (1 - beta ln[2 (cosh xi + cos theta)]) / 2
//   beta >  1: (1 + cosh xi cos theta) / (2 beta (cosh xi + cos theta)^2)
inline double re_p_elementary(double xi, double theta, double beta) {
  const double m = metric_denominator({xi, theta});
  if (beta <= 1.0) return 0.5 * (1 - beta * std::log(2 * m));
  return (1 + std::cosh(xi) * std::cos(theta)) / (2 * beta * m * m);
}

inline BoundaryProfile boundary_profiles(const DiskPairGeometry& g, const ConductivityPair& c,
                                         const HarmonicDrive& d, int j, std::span<const double> thetas,
                                         double tol = 1e-10) {
  if (j != 1 && j != 2) throw DomainError("boundary_profiles: j must be 1 or 2");
  const SingularParams p = make_params(g, c, d);
  const TransmissionSolver solver(g, c, d, tol);
  const double xij = j == 1 ? g.xi1() : g.xi2();
  BoundaryProfile out;
  out.j = j;
  out.thetas.assign(thetas.begin(), thetas.end());
  for (double th : thetas) {
    const FieldValue f = solver.on_boundary(j, th);
    FieldValue rel = f;
    rel.grad = f.grad - Vec2{d.hx, d.hy};
    out.exact_normal.push_back(normal_derivative(rel));
    out.exact_tangential.push_back(tangential_derivative(rel));
    out.exact_grad_norm.push_back(rel.grad.norm());

    const SingularValue q = evaluate_q(f.bp, Side::Exterior, g, p);
    FieldValue sing = f;
    sing.grad = singular_part(q, p).second;
    out.singular_normal.push_back(normal_derivative(sing));
    out.singular_tangential.push_back(tangential_derivative(sing));

    const double pre = q_prefactor(g, p, j, th);
    const double re_p = cap_P(std::exp(Complex(-xij, -th)), p.beta, {1e-12, 50'000'000}).real();
    out.q_profile.push_back(pre * re_p);
    out.corollary.push_back(std::abs(pre * re_p));
    out.asymptotic.push_back(pre * re_p_elementary(xij, th, p.beta));
  }
  return out;
}

struct InfinityGap {
  int j = 1;
  double beta = 0;
  std::vector<double> thetas;
  std::vector<double> gap_normal;  // d(u_k - u_inf)/dnu, exterior side
  std::vector<double> gap_grad;    // |grad(u_k - u_inf)|, exterior side
  std::vector<double> prediction;  // singular-term prediction for gap_normal
  std::vector<double> u_inf_normal;
};

// Equal conductivities k on both disks, H = x. The prediction is
//   -s_j c_n (cosh xi_j + cos theta) / (r* sqrt(eps)) beta ln[2 (cosh xi_j + cos theta)].
inline InfinityGap infinity_gap(const DiskPairGeometry& g, double k, std::span<const double> thetas, int j = 1,
                                double tol = 1e-10) {
  if (!(k > 1)) throw DomainError("infinity_gap: k must exceed 1");
  if (j != 1 && j != 2) throw DomainError("infinity_gap: j must be 1 or 2");
  const HarmonicDrive d{1.0, 0.0};
  const ConductivityPair c = finite_pair(k, k);
  const SingularParams p = make_params(g, c, d);
  const TransmissionSolver finite(g, c, d, tol);
  const TransmissionSolver perfect = perfect_conductor_solver(g, d, tol);
  const double xij = j == 1 ? g.xi1() : g.xi2();
  const double sj = j == 1 ? 1.0 : -1.0;
  InfinityGap out;
  out.j = j;
  out.beta = p.beta;
  out.thetas.assign(thetas.begin(), thetas.end());
  for (double th : thetas) {
    const FieldValue fk = finite.on_boundary(j, th);
    const FieldValue fi = perfect.on_boundary(j, th);
    FieldValue diff = fk;
    diff.grad = fk.grad - fi.grad;
    out.gap_normal.push_back(normal_derivative(diff));
    out.gap_grad.push_back(diff.grad.norm());
    out.u_inf_normal.push_back(normal_derivative(fi));
    const double m = metric_denominator({xij, th});
    out.prediction.push_back(-sj * p.c_n * m / (g.r_star() * std::sqrt(g.eps())) * p.beta * std::log(2 * m));
  }
  return out;
}

}  // namespace gapfield
