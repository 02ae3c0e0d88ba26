#pragma once

// Lerch transcendent Phi(z, 1, beta) = sum_{n>=0} z^n / (n + beta) and the
// two functions built from it:
//
//   L(z; beta) = -int_0^1 z t^beta / (1 + z t) dt = -z Phi(-z, 1, beta + 1)
//   P(z; beta) = -z dL/dz = z / (1 + z) - beta z Phi(-z, 1, beta + 1)
//
// L generalizes -log(1 + z) (beta = 0) and P generalizes z / (1 + z).
// The power series is the primary path; an adaptive Gauss-Kronrod quadrature
// of the integral representation is available for cross-checking.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "gapfield/errors.hpp"

namespace gapfield {

using Complex = std::complex<double>;

struct EvalBudget {
  double tol = 1e-10;
  long max_terms = 50'000'000;
};

inline constexpr double kMaxLerchModulus = 1.0 - 1e-6;

namespace detail {

inline void check_budget(const EvalBudget& b) {
  if (!(b.tol >= 1e-14) || !(b.max_terms > 0))
    throw DomainError("EvalBudget: tol must be >= 1e-14 and max_terms positive");
}

inline void check_modulus(Complex z) {
  if (!(std::abs(z) <= kMaxLerchModulus))
    throw DomainError("Lerch argument too close to the unit circle");
}

// Power series with the a-priori tail bound
//   sum_{n>N} |z|^n / (n + beta) <= |z|^{N+1} / ((N + 1 + beta) (1 - |z|)).
// tol is absolute; no argument validation.
inline Complex phi_series(Complex z, double beta, double tol, long max_terms) {
  const double r = std::abs(z);
  Complex sum = 1.0 / beta;
  if (r == 0.0) return sum;
  const double inv_gap = 1.0 / (1.0 - r);
  Complex zn = 1.0;
  double rn = 1.0;
  for (long n = 1; n <= max_terms; ++n) {
    zn *= z;
    rn *= r;
    sum += zn / (n + beta);
    const double tail = rn * r * inv_gap / (n + 1 + beta);
    if (tail <= tol) return sum;
  }
  throw EvaluationError("lerch_phi: term budget exhausted",
                        std::pow(r, max_terms + 1) * inv_gap / (max_terms + 1 + beta), max_terms);
}

}  // namespace detail

inline Complex lerch_phi(Complex z, double beta, const EvalBudget& budget = {}) {
  detail::check_budget(budget);
  detail::check_modulus(z);
  if (!(beta > 0) || !std::isfinite(beta)) throw DomainError("lerch_phi: beta must be positive");
  return detail::phi_series(z, beta, budget.tol, budget.max_terms);
}

struct QuadratureValue {
  Complex value;
  double error_estimate;
};

// Phi(z, 1, beta) = int_0^inf e^{-beta t} / (1 - z e^{-t}) dt. With u = e^{-t}
// and the first terms split off:
//   Phi = 1/beta + z/(beta+1) + z^2/(beta+2) + z^3 int_0^1 u^{beta+2} / (1 - z u) du.
// The remaining integrand is C^2 at u = 0 for every beta > 0, so adaptive
// refinement converges even for tiny beta.
inline QuadratureValue lerch_phi_quadrature(Complex z, double beta, double tol = 1e-13) {
  detail::check_modulus(z);
  if (!(beta > 0) || !std::isfinite(beta)) throw DomainError("lerch_phi: beta must be positive");
  auto f = [z, beta](double u) -> Complex { return std::pow(u, beta + 2) / (1.0 - z * u); };
  double err = 0.0;
  const Complex integral =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 20, tol, &err);
  const Complex z3 = z * z * z;
  return {1.0 / beta + z / (beta + 1) + z * z / (beta + 2) + z3 * integral, std::abs(z3) * err};
}

inline Complex cap_L(Complex z, double beta, const EvalBudget& budget = {}) {
  detail::check_budget(budget);
  detail::check_modulus(z);
  if (!(beta >= 0) || !std::isfinite(beta)) throw DomainError("cap_L: beta must be >= 0");
  if (beta == 0.0) return -std::log(1.0 + z);
  return -z * detail::phi_series(-z, beta + 1, budget.tol, budget.max_terms);
}

// The Phi term enters multiplied by beta, so its tolerance is tightened
// by 1/(1 + beta) to keep P itself within budget.tol.
inline Complex cap_P(Complex z, double beta, const EvalBudget& budget = {}) {
  detail::check_budget(budget);
  detail::check_modulus(z);
  if (!(beta >= 0) || !std::isfinite(beta)) throw DomainError("cap_P: beta must be >= 0");
  const Complex lead = z / (1.0 + z);
  if (beta == 0.0) return lead;
  const double tol = budget.tol / (1.0 + beta);
  return lead - beta * z * detail::phi_series(-z, beta + 1, tol, budget.max_terms);
}

// p_theta(t) = 1 / (1 + e^{-t + i theta}).
inline Complex p_theta(double t, double theta) {
  if (!(t > 0)) throw DomainError("p_theta: t must be positive");
  return 1.0 / (1.0 + std::exp(Complex(-t, theta)));
}

// p_theta'(t) = e^{-t + i theta} / (1 + e^{-t + i theta})^2, with modulus
// 1 / (2 (cosh t + cos theta)).
inline Complex p_theta_prime(double t, double theta) {
  if (!(t > 0)) throw DomainError("p_theta_prime: t must be positive");
  const Complex w = std::exp(Complex(-t, theta));
  const Complex d = 1.0 + w;
  return w / (d * d);
}

enum class AsymptoticRegime { SmallBeta, LargeBeta };

struct AsymptoticValue {
  Complex value;
  double error_bound;
};

// Elementary approximations of Phi(z, 1, beta) at the ends of the beta range.
//  small (beta <= 0.1): 1/beta - log(1 - z); the remainder
//      -beta sum z^k / (k^2 (1 + beta/k)) is bounded by beta Li2(|z|).
//  large (beta >= 10):  1/(beta (1 - z)) - z / (beta^2 (1 - z)^2); the
//      remainder is at most 32 / (beta^3 (cosh xi + cos theta)^{3/2}) for
//      z = -e^{-xi + i theta}.
inline AsymptoticValue phi_asymptotic(Complex z, double beta, AsymptoticRegime regime) {
  detail::check_modulus(z);
  const double r = std::abs(z);
  if (regime == AsymptoticRegime::SmallBeta) {
    if (!(beta > 0 && beta <= 0.1)) throw DomainError("phi_asymptotic: small regime needs 0 < beta <= 0.1");
    // Li2(r) summed until the remaining tail r^{k+1} / ((k+1)^2 (1 - r)) is negligible
    double li2 = 0.0, rk = 1.0, tail = 0.0;
    for (long k = 1; k <= 1'000'000; ++k) {
      rk *= r;
      li2 += rk / (double(k) * k);
      tail = rk * r / ((k + 1.0) * (k + 1.0) * (1.0 - r));
      if (tail < 1e-17) break;
    }
    li2 = std::min(li2 + tail, std::numbers::pi * std::numbers::pi / 6);
    return {1.0 / beta - std::log(1.0 - z), beta * li2};
  }
  if (!(beta >= 10)) throw DomainError("phi_asymptotic: large regime needs beta >= 10");
  const Complex om = 1.0 - z;
  const Complex value = 1.0 / (beta * om) - z / (beta * beta * om * om);
  if (r == 0.0) return {value, 0.0};
  const double metric = std::norm(om) / (2 * r);  // cosh xi + cos theta
  return {value, 32.0 / (beta * beta * beta * std::pow(metric, 1.5))};
}

struct SummationGap {
  double gap;    // |a0 sum_m tau^{m-1} p'(m a0 - a) - P(e^{-(a0-a)+i theta}; -ln(tau)/a0)|
  double bound;  // 4 a0 / (cosh(a0 - a) + cos theta)
  long terms;
  bool holds() const { return gap <= bound; }
};

// Compares the geometric-weighted sample sum of p_theta' with its
// continuous counterpart P. Direct summation stops once the tail,
// at most a0 tau^M |p'(M a0 + s0)| / (1 - tau), falls below 1e-13.
inline SummationGap summation_identity_gap(double a0, double a, double tau, double theta,
                                           long max_terms = 100'000'000) {
  if (!(a0 > 0) || !(a < a0) || !(tau > 0 && tau < 1) || !std::isfinite(a) || !std::isfinite(theta))
    throw DomainError("summation_identity_gap: need a0 > 0, a < a0, 0 < tau < 1");
  const double s0 = a0 - a;
  Complex sum = 0.0;
  double weight = 1.0;
  long m = 0;
  for (; m < max_terms; ++m) {
    const double t = m * a0 + s0;
    sum += weight * p_theta_prime(t, theta);
    weight *= tau;
    const double next = 1.0 / (2 * (std::cosh(t + a0) + std::cos(theta)));
    if (a0 * weight * next / (1.0 - tau) < 1e-13) break;
  }
  if (m == max_terms) throw EvaluationError("summation_identity_gap: term budget exhausted", 0.0, m);
  sum *= a0;
  const double b = -std::log(tau) / a0;
  const Complex p = cap_P(std::exp(Complex(-s0, theta)), b, {1e-14, 50'000'000});
  const double bound = 4 * a0 / (std::cosh(s0) + std::cos(theta));
  return {std::abs(sum - p), bound, m + 1};
}

}  // namespace gapfield
