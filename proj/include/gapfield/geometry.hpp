#pragma once

// Two-disk geometry in bipolar coordinates.
//
// All evaluation happens in the canonical frame: the poles (common fixed
// points of the two disk reflections) sit at (-alpha, 0) and (alpha, 0),
// disk 1 lies on the left (xi < -xi1 inside) and disk 2 on the right
// (xi > xi2 inside). A RigidFrame maps canonical coordinates to a
// user-supplied placement of the disks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "gapfield/errors.hpp"

namespace gapfield {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
};

using CartesianPoint = Vec2;

struct BipolarPoint {
  double xi = 0.0;
  double theta = 0.0;  // (-pi, pi]
};

struct Disk {
  double radius = 1.0;
  CartesianPoint center{};
};

enum class Region { Interior1, Interior2, Exterior, Boundary1, Boundary2 };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::Interior1: return "interior1";
    case Region::Interior2: return "interior2";
    case Region::Exterior: return "exterior";
    case Region::Boundary1: return "boundary1";
    case Region::Boundary2: return "boundary2";
  }
  return "?";
}

// Rotation + translation taking canonical coordinates to world coordinates.
class RigidFrame {
 public:
  RigidFrame() = default;
  RigidFrame(CartesianPoint origin, double angle)
      : origin_(origin), cos_(std::cos(angle)), sin_(std::sin(angle)) {}

  Vec2 rotate(Vec2 v) const { return {cos_ * v.x - sin_ * v.y, sin_ * v.x + cos_ * v.y}; }
  Vec2 unrotate(Vec2 v) const { return {cos_ * v.x + sin_ * v.y, -sin_ * v.x + cos_ * v.y}; }
  CartesianPoint to_world(CartesianPoint p) const { return origin_ + rotate(p); }
  CartesianPoint to_canonical(CartesianPoint p) const { return unrotate(p - origin_); }

 private:
  CartesianPoint origin_{};
  double cos_ = 1.0;
  double sin_ = 0.0;
};

class DiskPairGeometry {
 public:
  double r1() const { return disk1_.radius; }
  double r2() const { return disk2_.radius; }
  double eps() const { return eps_; }
  double alpha() const { return alpha_; }
  double xi1() const { return xi1_; }
  double xi2() const { return xi2_; }
  double xi_min() const { return std::min(xi1_, xi2_); }
  double xi_max() const { return std::max(xi1_, xi2_); }
  double r_star() const { return r_star_; }

  // Canonical-frame quantities.
  const Disk& disk1() const { return disk1_; }
  const Disk& disk2() const { return disk2_; }
  const Disk& disk(int j) const { return j == 1 ? disk1_ : disk2_; }
  CartesianPoint pole1() const { return {-alpha_, 0.0}; }
  CartesianPoint pole2() const { return {alpha_, 0.0}; }
  CartesianPoint midpoint() const { return midpoint_; }
  Vec2 unit_normal() const { return {1.0, 0.0}; }
  Vec2 unit_tangent() const { return {0.0, 1.0}; }

  // Point of boundary j closest to the other disk.
  CartesianPoint closest_point(int j) const { return j == 1 ? x1_ : x2_; }

  // Signed xi-level of boundary j: -xi1 for disk 1, +xi2 for disk 2.
  double boundary_level(int j) const { return j == 1 ? -xi1_ : xi2_; }

  const RigidFrame& frame() const { return frame_; }

  friend DiskPairGeometry build_geometry(double r1, double r2, double eps);

 private:
  Disk disk1_, disk2_;
  double eps_ = 0, alpha_ = 0, xi1_ = 0, xi2_ = 0, r_star_ = 0;
  CartesianPoint midpoint_{}, x1_{}, x2_{};
  RigidFrame frame_{};

  friend DiskPairGeometry build_geometry(const Disk& a, const Disk& b);
};

// Half the pole separation, from the gap and radii.
inline double pole_half_distance(double r1, double r2, double eps) {
  const double num = eps * (2 * r1 + eps) * (2 * r2 + eps) * (2 * r1 + 2 * r2 + eps);
  return std::sqrt(num) / (2 * r1 + 2 * r2 + 2 * eps);
}

inline DiskPairGeometry build_geometry(double r1, double r2, double eps) {
  if (!(r1 > 0) || !(r2 > 0) || !(eps > 0) || !std::isfinite(r1) || !std::isfinite(r2) ||
      !std::isfinite(eps))
    throw DomainError("build_geometry: radii and gap must be finite and positive");

  DiskPairGeometry g;
  g.eps_ = eps;
  g.alpha_ = pole_half_distance(r1, r2, eps);
  g.xi1_ = std::asinh(g.alpha_ / r1);
  g.xi2_ = std::asinh(g.alpha_ / r2);
  g.r_star_ = std::sqrt(2 * r1 * r2 / (r1 + r2));

  const double a2 = g.alpha_ * g.alpha_;
  const double s1 = std::sqrt(r1 * r1 + a2);
  const double s2 = std::sqrt(r2 * r2 + a2);
  g.disk1_ = {r1, {-s1, 0.0}};
  g.disk2_ = {r2, {s2, 0.0}};
  // c_j + (-1)^{j+1} r_j, written without cancellation.
  g.x1_ = {-a2 / (s1 + r1), 0.0};
  g.x2_ = {a2 / (s2 + r2), 0.0};
  g.midpoint_ = {0.5 * (g.x1_.x + g.x2_.x), 0.0};
  return g;
}

// Geometry for disks placed anywhere in the plane. The stored frame maps
// canonical coordinates back to the placement given here.
inline DiskPairGeometry build_geometry(const Disk& a, const Disk& b) {
  const Vec2 d = b.center - a.center;
  const double dist = d.norm();
  const double eps = dist - a.radius - b.radius;
  if (!(eps > 0)) throw DomainError("build_geometry: disks overlap or touch");
  DiskPairGeometry g = build_geometry(a.radius, b.radius, eps);
  const double angle = std::atan2(d.y, d.x);
  const RigidFrame rot(CartesianPoint{}, angle);
  g.frame_ = RigidFrame(a.center - rot.rotate(g.disk1_.center), angle);
  return g;
}

inline void check_off_poles(CartesianPoint pt, const DiskPairGeometry& g) {
  const double guard = 1e-12 * g.alpha();
  if ((pt - g.pole1()).norm() <= guard || (pt - g.pole2()).norm() <= guard)
    throw DomainError("bipolar coordinates are singular at the poles");
}

inline BipolarPoint to_bipolar(CartesianPoint pt, const DiskPairGeometry& g) {
  check_off_poles(pt, g);
  const double a = g.alpha();
  const double x = pt.x, y = pt.y;
  // xi = 0.5 ln(|z+a|^2 / |z-a|^2), written as log1p of the excess ratio.
  const double dm = (x - a) * (x - a) + y * y;
  const double xi = 0.5 * std::log1p(4 * a * x / dm);
  // arg((z+a) * conj(a-z)) = arg(a^2 - |z|^2 + 2 i a y)
  double theta = std::atan2(2 * a * y, a * a - x * x - y * y);
  if (theta <= -std::numbers::pi) theta = std::numbers::pi;
  return {xi, theta};
}

// cosh(xi) + cos(theta), evaluated as 2 (sinh^2(xi/2) + cos^2(theta/2)).
inline double metric_denominator(const BipolarPoint& bp) {
  const double sh = std::sinh(0.5 * bp.xi);
  const double c = std::cos(0.5 * bp.theta);
  return 2 * (sh * sh + c * c);
}

inline CartesianPoint to_cartesian(const BipolarPoint& bp, const DiskPairGeometry& g) {
  const double den = metric_denominator(bp);
  if (!(den > 0) || (bp.xi == 0.0 && std::abs(bp.theta) >= std::numbers::pi)) throw DomainError("to_cartesian: (0, pi) is the point at infinity");
  return {g.alpha() * std::sinh(bp.xi) / den, g.alpha() * std::sin(bp.theta) / den};
}

inline CartesianPoint boundary_point(const DiskPairGeometry& g, int j, double theta) {
  return to_cartesian({g.boundary_level(j), theta}, g);
}

inline CartesianPoint reflect(CartesianPoint pt, const Disk& d) {
  const Vec2 v = pt - d.center;
  const double r2 = v.dot(v);
  if (r2 == 0.0) throw DomainError("reflect: the center maps to infinity");
  return d.center + (d.radius * d.radius / r2) * v;
}

inline double default_boundary_tolerance(const DiskPairGeometry& g) {
  return 1e-9 * std::min(g.r1(), g.r2());
}

inline Region classify_region(CartesianPoint pt, const DiskPairGeometry& g, double tol) {
  if (tol < 0) throw DomainError("classify_region: negative tolerance");
  for (int j = 1; j <= 2; ++j) {
    const Disk& d = g.disk(j);
    const double gap = (pt - d.center).norm() - d.radius;
    if (std::abs(gap) <= tol) return j == 1 ? Region::Boundary1 : Region::Boundary2;
    if (gap < 0) return j == 1 ? Region::Interior1 : Region::Interior2;
  }
  return Region::Exterior;
}

inline Region classify_region(CartesianPoint pt, const DiskPairGeometry& g) {
  return classify_region(pt, g, default_boundary_tolerance(g));
}

// Unit vector along increasing xi; e_theta is its rotation by +pi/2.
inline Vec2 unit_e_xi(const BipolarPoint& bp) {
  const std::complex<double> c = std::cosh(std::complex<double>(0.5 * bp.xi, 0.5 * bp.theta));
  const std::complex<double> u = std::conj(c) / std::abs(c);
  const std::complex<double> e = u * u;
  return {e.real(), e.imag()};
}

inline Vec2 unit_e_theta(const BipolarPoint& bp) {
  const Vec2 e = unit_e_xi(bp);
  return {-e.y, e.x};
}

struct GradientFrame {
  Vec2 grad;          // Cartesian gradient
  double normal;      // derivative along the outward normal of the level circle xi = const
  double tangential;  // derivative along that normal rotated by +pi/2
};

inline double level_sign(double c) { return c < 0 ? -1.0 : 1.0; }

// Maps partial derivatives in (xi, theta) to a Cartesian gradient using the
// bipolar scale factor (cosh xi + cos theta) / alpha. The level circle
// through bp has outward normal -sgn(xi) e_xi and tangent -sgn(xi) e_theta.
inline GradientFrame cartesian_gradient(double dg_dxi, double dg_dtheta, const BipolarPoint& bp,
                                        const DiskPairGeometry& g) {
  const double h = metric_denominator(bp) / g.alpha();
  const Vec2 exi = unit_e_xi(bp);
  const Vec2 eth{-exi.y, exi.x};
  const Vec2 grad = (h * dg_dxi) * exi + (h * dg_dtheta) * eth;
  const double s = -level_sign(bp.xi);
  return {grad, s * h * dg_dxi, s * h * dg_dtheta};
}

}  // namespace gapfield
