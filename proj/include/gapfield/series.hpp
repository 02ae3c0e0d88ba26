#pragma once

// Exact solution of the two-disk transmission problem for a linear
// background field, as a Fourier series in bipolar coordinates.
//
// For H = x the solution is x + Re U, with
//   U = C + sum_n A_n e^{n(xi + i theta)} + B_n e^{-n(xi + i theta)}   (exterior)
// and reflected branches inside each disk. For H = y the solution is
// y + Im U evaluated with the reciprocal conductivities (tau_j -> -tau_j).
//
// The coefficients are stored in factored form,
//   A_n = -K_n (tau2 e^{-2n xi2} + tau E_n),  B_n = K_n (tau1 e^{-2n xi1} + tau E_n),
//   K_n = 2 alpha (-1)^n / (1 - tau E_n),     E_n = e^{-2n (xi1 + xi2)},
// so every exponential that is evaluated has a non-positive exponent.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>

#include "gapfield/errors.hpp"
#include "gapfield/geometry.hpp"
#include "gapfield/lerch.hpp"

namespace gapfield {

class Conductivity {
 public:
  enum class Kind { Finite, PerfectlyConducting, Insulating };

  static Conductivity finite(double k) {
    if (!(k > 0) || !std::isfinite(k)) throw DomainError("conductivity must be positive and finite");
    if (k == 1.0) throw DomainError("conductivity 1 makes the inclusion invisible (tau = 0)");
    return Conductivity(Kind::Finite, k);
  }
  static Conductivity perfect() { return Conductivity(Kind::PerfectlyConducting, 0); }
  static Conductivity insulating() { return Conductivity(Kind::Insulating, 0); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  double value() const {
    switch (kind_) {
      case Kind::PerfectlyConducting: return std::numeric_limits<double>::infinity();
      case Kind::Insulating: return 0.0;
      default: return k_;
    }
  }

  // (k - 1) / (k + 1); +1 for a perfect conductor, -1 for an insulator.
  double tau() const {
    switch (kind_) {
      case Kind::PerfectlyConducting: return 1.0;
      case Kind::Insulating: return -1.0;
      default: return (k_ - 1) / (k_ + 1);
    }
  }

  Conductivity reciprocal() const {
    switch (kind_) {
      case Kind::PerfectlyConducting: return insulating();
      case Kind::Insulating: return perfect();
      default: return finite(1.0 / k_);
    }
  }

 private:
  Conductivity(Kind kind, double k) : kind_(kind), k_(k) {}
  Kind kind_;
  double k_;
};

struct ConductivityPair {
  Conductivity k1;
  Conductivity k2;

  double tau1() const { return k1.tau(); }
  double tau2() const { return k2.tau(); }
  double tau() const { return tau1() * tau2(); }
  bool finite() const { return k1.is_finite() && k2.is_finite(); }
};

inline ConductivityPair finite_pair(double k1, double k2) {
  return {Conductivity::finite(k1), Conductivity::finite(k2)};
}
inline ConductivityPair perfect_pair() { return {Conductivity::perfect(), Conductivity::perfect()}; }

// Linear background H(x, y) = hx x + hy y in the canonical frame.
struct HarmonicDrive {
  double hx = 1.0;
  double hy = 0.0;
};

struct Truncation {
  double tol = 0.0;
  long n_used = 0;             // terms needed for the potential
  double tail_bound = 0.0;     // a-priori bound on the omitted potential terms
  long grad_n_used = 0;        // terms needed for the (xi, theta) partials
  double grad_tail_bound = 0.0;
};

struct CoefficientPair {
  double a;
  double b;
};

inline constexpr long kMaxSeriesTerms = 200'000;

inline CoefficientPair series_coefficients(const DiskPairGeometry& g, double tau1, double tau2, long n) {
  if (n < 1) throw DomainError("coefficients: n must be >= 1");
  if (tau1 == 0.0 || tau2 == 0.0) throw DomainError("coefficients: tau_j = 0 is degenerate");
  const double tau = tau1 * tau2;
  const double e1 = std::exp(-2.0 * n * g.xi1());
  const double e2 = std::exp(-2.0 * n * g.xi2());
  const double e12 = e1 * e2;
  const double k = 2 * g.alpha() * (n % 2 == 0 ? 1.0 : -1.0) / (1 - tau * e12);
  return {-k * (tau2 * e2 + tau * e12), k * (tau1 * e1 + tau * e12)};
}

inline CoefficientPair coefficients(const DiskPairGeometry& g, const ConductivityPair& c, long n) {
  return series_coefficients(g, c.tau1(), c.tau2(), n);
}

// Perfect-conductor limit tau_1 = tau_2 = 1.
inline CoefficientPair coefficients_perfect(const DiskPairGeometry& g, long n) {
  return series_coefficients(g, 1.0, 1.0, n);
}

// Which branch of the piecewise series to use. Auto picks by region and
// treats boundary points as exterior (one-sided exterior limit).
enum class Side { Auto, Exterior, Interior1, Interior2 };

inline Side side_for(Region r) {
  switch (r) {
    case Region::Interior1: return Side::Interior1;
    case Region::Interior2: return Side::Interior2;
    default: return Side::Exterior;
  }
}

struct SeriesValue {
  Complex u;        // U
  Complex u_xi;     // dU/dxi
  Complex u_theta;  // dU/dtheta
  Truncation trunc;
};

// Complex series U for H = x with the given contrasts. Immutable once built;
// the constant C is summed at construction.
class BipolarSeries {
 public:
  BipolarSeries(const DiskPairGeometry& g, double tau1, double tau2, double tol)
      : g_(g), tau1_(tau1), tau2_(tau2), tau_(tau1 * tau2), tol_(tol) {
    if (tau1 == 0.0 || tau2 == 0.0) throw DomainError("series: tau_j = 0 is degenerate");
    if (!(std::abs(tau1) <= 1) || !(std::abs(tau2) <= 1)) throw DomainError("series: |tau_j| must be <= 1");
    if (!(tol >= 1e-14)) throw DomainError("series: tol must be >= 1e-14");
    e12_ = std::exp(-2 * (g.xi1() + g.xi2()));
    bound_ = 2 * g.alpha() / (1 - std::abs(tau_) * e12_);
    sum_constant();
  }

  double constant() const { return constant_; }
  double tau1() const { return tau1_; }
  double tau2() const { return tau2_; }

  SeriesValue evaluate(const BipolarPoint& bp, Side side) const {
    const double xi = bp.xi, th = bp.theta;
    const double x1 = g_.xi1(), x2 = g_.xi2();
    // family: weight, exponent offset, sign of xi, sign of theta
    struct Family { double w, off, sx, st; };
    std::array<Family, 4> fam{};
    switch (side) {
      case Side::Interior1:
        fam = {{{-tau2_, -2 * x2, 1, 1}, {-tau_, -2 * x1 - 2 * x2, 1, 1}, {tau1_, 0.0, 1, -1}, {tau_, -2 * x2, 1, -1}}};
        break;
      case Side::Interior2:
        fam = {{{-tau2_, 0.0, -1, 1}, {-tau_, -2 * x1, -1, 1}, {tau1_, -2 * x1, -1, -1}, {tau_, -2 * x1 - 2 * x2, -1, -1}}};
        break;
      default:
        fam = {{{-tau2_, -2 * x2, 1, 1}, {-tau_, -2 * x1 - 2 * x2, 1, 1}, {tau1_, -2 * x1, -1, -1}, {tau_, -2 * x1 - 2 * x2, -1, -1}}};
        break;
    }

    std::array<Complex, 4> ratio{}, power{};
    std::array<double, 4> modulus{};
    for (int f = 0; f < 4; ++f) {
      const double expo = fam[f].off + fam[f].sx * xi;
      if (!(expo < 0)) throw DomainError("series: point lies outside the requested branch");
      modulus[f] = std::exp(expo);
      ratio[f] = -modulus[f] * std::exp(Complex(0.0, fam[f].st * th));
      power[f] = 1.0;
    }

    auto value_tail = [&](long n) {
      double t = 0;
      for (int f = 0; f < 4; ++f) {
        const double x = modulus[f];
        t += std::abs(fam[f].w) * std::pow(x, n + 1) / (1 - x);
      }
      return bound_ * t;
    };
    auto deriv_tail = [&](long n) {
      double t = 0;
      for (int f = 0; f < 4; ++f) {
        const double x = modulus[f];
        t += std::abs(fam[f].w) * std::pow(x, n + 1) * ((n + 1) - n * x) / ((1 - x) * (1 - x));
      }
      return bound_ * t;
    };

    SeriesValue out{Complex(constant_, 0.0), 0.0, 0.0, {}};
    out.trunc.tol = tol_;
    const double small = tol_ / 10;
    int quiet = 0;
    bool value_done = false;
    double en = 1.0;
    for (long n = 1; n <= kMaxSeriesTerms; ++n) {
      en *= e12_;
      const double kn = 2 * g_.alpha() / (1 - tau_ * en);
      Complex term = 0.0, dxi = 0.0, dth = 0.0;
      for (int f = 0; f < 4; ++f) {
        power[f] *= ratio[f];
        const Complex c = fam[f].w * power[f];
        term += c;
        dxi += fam[f].sx * c;
        dth += fam[f].st * c;
      }
      term *= kn;
      out.u += term;
      out.u_xi += (kn * n) * dxi;
      out.u_theta += Complex(0.0, kn * n) * dth;

      if (!value_done) {
        quiet = std::abs(term) < small ? quiet + 1 : 0;
        if (quiet >= 3) {
          const double tail = value_tail(n);
          if (tail <= tol_) {
            value_done = true;
            out.trunc.n_used = n;
            out.trunc.tail_bound = tail;
          }
        }
      }
      if (value_done) {
        const double dtail = deriv_tail(n);
        if (dtail <= tol_) {
          out.trunc.grad_n_used = n;
          out.trunc.grad_tail_bound = dtail;
          // terms past n_used were still accumulated into u
          out.trunc.tail_bound = value_tail(n);
          return out;
        }
      }
    }
    throw EvaluationError("series: term budget exhausted", value_done ? deriv_tail(kMaxSeriesTerms) : value_tail(kMaxSeriesTerms),
                          kMaxSeriesTerms);
  }

 private:
  void sum_constant() {
    // C = -2 alpha sum_n (tau1 e^{-2n xi1} - tau2 e^{-2n xi2}) / (1 - tau E_n)
    const double y1 = std::exp(-2 * g_.xi1()), y2 = std::exp(-2 * g_.xi2());
    double p1 = 1, p2 = 1, en = 1, sum = 0;
    for (long n = 1; n <= kMaxSeriesTerms; ++n) {
      p1 *= y1;
      p2 *= y2;
      en *= e12_;
      sum += (tau1_ * p1 - tau2_ * p2) / (1 - tau_ * en);
      const double tail = bound_ * (std::abs(tau1_) * p1 * y1 / (1 - y1) + std::abs(tau2_) * p2 * y2 / (1 - y2));
      if (tail <= tol_ / 10) {
        constant_ = -2 * g_.alpha() * sum;
        return;
      }
    }
    throw EvaluationError("series constant: term budget exhausted", 0.0, kMaxSeriesTerms);
  }

  DiskPairGeometry g_;
  double tau1_, tau2_, tau_, tol_;
  double e12_ = 0, bound_ = 0, constant_ = 0;
};

struct FieldValue {
  double u = 0;
  Vec2 grad{};
  Region region = Region::Exterior;
  Side side = Side::Exterior;
  BipolarPoint bp{};
  Truncation trunc{};
};

inline double normal_derivative(const FieldValue& f) {
  const Vec2 e = unit_e_xi(f.bp);
  return -level_sign(f.bp.xi) * f.grad.dot(e);
}
inline double tangential_derivative(const FieldValue& f) {
  const Vec2 e = unit_e_theta(f.bp);
  return -level_sign(f.bp.xi) * f.grad.dot(e);
}

// Full solution u = hx (x + Re U[tau]) + hy (y + Im U[-tau]) for one geometry,
// conductivity pair and drive. Immutable; evaluation is thread-safe.
class TransmissionSolver {
 public:
  TransmissionSolver(const DiskPairGeometry& g, const ConductivityPair& c, const HarmonicDrive& d,
                     double tol = 1e-10)
      : g_(g), c_(c), d_(d), tol_(tol) {
    if (!std::isfinite(d.hx) || !std::isfinite(d.hy)) throw DomainError("drive must be finite");
    if (d.hx != 0.0) x_series_.emplace(g, c.tau1(), c.tau2(), tol);
    if (d.hy != 0.0) y_series_.emplace(g, -c.tau1(), -c.tau2(), tol);
  }

  const DiskPairGeometry& geometry() const { return g_; }
  const ConductivityPair& conductivities() const { return c_; }
  const HarmonicDrive& drive() const { return d_; }
  double tol() const { return tol_; }

  FieldValue at(const BipolarPoint& bp, Side side) const {
    if (side == Side::Auto) side = side_for(classify_region(to_cartesian(bp, g_), g_));
    const CartesianPoint pt = to_cartesian(bp, g_);
    FieldValue out;
    out.bp = bp;
    out.side = side;
    out.region = classify_region(pt, g_);
    out.u = d_.hx * pt.x + d_.hy * pt.y;
    out.grad = {d_.hx, d_.hy};
    out.trunc.tol = tol_;
    auto merge = [&](const Truncation& t) {
      out.trunc.n_used = std::max(out.trunc.n_used, t.n_used);
      out.trunc.grad_n_used = std::max(out.trunc.grad_n_used, t.grad_n_used);
      out.trunc.tail_bound += t.tail_bound;
      out.trunc.grad_tail_bound += t.grad_tail_bound;
    };
    if (x_series_) {
      const SeriesValue s = x_series_->evaluate(bp, side);
      out.u += d_.hx * s.u.real();
      out.grad = out.grad + d_.hx * cartesian_gradient(s.u_xi.real(), s.u_theta.real(), bp, g_).grad;
      merge(s.trunc);
    }
    if (y_series_) {
      const SeriesValue s = y_series_->evaluate(bp, side);
      out.u += d_.hy * s.u.imag();
      out.grad = out.grad + d_.hy * cartesian_gradient(s.u_xi.imag(), s.u_theta.imag(), bp, g_).grad;
      merge(s.trunc);
    }
    return out;
  }

  FieldValue at(CartesianPoint pt, Side side = Side::Auto) const {
    const BipolarPoint bp = to_bipolar(pt, g_);
    if (side == Side::Auto) side = side_for(classify_region(pt, g_));
    FieldValue out = at(bp, side);
    out.region = classify_region(pt, g_);
    return out;
  }

  // One-sided value on boundary j at angle theta.
  FieldValue on_boundary(int j, double theta, bool interior = false) const {
    const BipolarPoint bp{g_.boundary_level(j), theta};
    FieldValue out = at(bp, interior ? (j == 1 ? Side::Interior1 : Side::Interior2) : Side::Exterior);
    out.region = j == 1 ? Region::Boundary1 : Region::Boundary2;
    return out;
  }

 private:
  DiskPairGeometry g_;
  ConductivityPair c_;
  HarmonicDrive d_;
  double tol_;
  std::optional<BipolarSeries> x_series_, y_series_;
};

inline FieldValue evaluate_u(CartesianPoint pt, const DiskPairGeometry& g, const ConductivityPair& c,
                             const HarmonicDrive& d, double tol = 1e-10, Side side = Side::Auto) {
  return TransmissionSolver(g, c, d, tol).at(pt, side);
}

// Perfect-conductor solution for H = hx x.
inline TransmissionSolver perfect_conductor_solver(const DiskPairGeometry& g, const HarmonicDrive& d,
                                                   double tol = 1e-10) {
  if (d.hy != 0.0) throw DomainError("perfect-conductor solution is defined for H = hx x only");
  return TransmissionSolver(g, perfect_pair(), d, tol);
}

inline FieldValue evaluate_u_infinity(CartesianPoint pt, const DiskPairGeometry& g, const HarmonicDrive& d,
                                      double tol = 1e-10, Side side = Side::Auto) {
  return perfect_conductor_solver(g, d, tol).at(pt, side);
}

}  // namespace gapfield
