#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "gapfield/lerch.hpp"

using namespace gapfield;

namespace {

constexpr double kPi = std::numbers::pi;
const EvalBudget kTight{1e-13, 50'000'000};

// -int_0^1 z t^beta / (1 + z t) dt, integrated directly.
Complex direct_L(Complex z, double beta) {
  auto f = [&](double t) -> Complex { return z * std::pow(t, beta) / (1.0 + z * t); };
  return -boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 25, 1e-14);
}

// int_0^inf e^{-beta t} p_theta'(t + s) dt
Complex integral_P(double s, double theta, double beta) {
  boost::math::quadrature::exp_sinh<double> q;
  auto re = [&](double t) { return std::exp(-beta * t) * p_theta_prime(t + s, theta).real(); };
  auto im = [&](double t) { return std::exp(-beta * t) * p_theta_prime(t + s, theta).imag(); };
  return {q.integrate(re, 0.0, std::numeric_limits<double>::infinity(), 1e-13),
          q.integrate(im, 0.0, std::numeric_limits<double>::infinity(), 1e-13)};
}

}  // namespace

TEST(LerchPhi, ZeroArgument) {
  for (double b : {1e-3, 0.5, 7.0, 1e3}) EXPECT_DOUBLE_EQ(lerch_phi(0.0, b).real(), 1 / b);
}

TEST(LerchPhi, ClosedFormAtOneHalf) {
  EXPECT_NEAR(lerch_phi(0.5, 1.0, kTight).real(), 2 * std::log(2.0), 1e-12);
  EXPECT_NEAR(lerch_phi(0.5, 1.0, kTight).imag(), 0.0, 1e-15);
}

TEST(LerchPhi, SeriesAgreesWithQuadrature) {
  const Complex z(-0.7, 0.2);
  const auto q = lerch_phi_quadrature(z, 3.5);
  EXPECT_LT(std::abs(lerch_phi(z, 3.5, {1e-12, 50'000'000}) - q.value), 1e-10);
}

TEST(LerchPhi, RandomDualPath) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> rad(0.0, 0.9), ang(-kPi, kPi), lb(std::log(1e-3), std::log(1e3));
  for (int i = 0; i < 200; ++i) {
    const Complex z = std::polar(rad(rng), ang(rng));
    const double b = std::exp(lb(rng));
    const Complex s = lerch_phi(z, b, {1e-12, 50'000'000});
    const auto q = lerch_phi_quadrature(z, b);
    EXPECT_LT(std::abs(s - q.value), 1e-10) << z << " " << b;
  }
}

TEST(LerchPhi, Errors) {
  EXPECT_THROW(lerch_phi(0.9999999, 1.0), DomainError);
  EXPECT_THROW(lerch_phi(Complex(0, 1), 1.0), DomainError);
  EXPECT_THROW(lerch_phi(0.5, 0.0), DomainError);
  EXPECT_THROW(lerch_phi(0.5, -1.0), DomainError);
  EXPECT_THROW(lerch_phi(0.5, 1.0, {1e-15, 100}), DomainError);
  EXPECT_THROW(lerch_phi(0.5, 1.0, {1e-10, 0}), DomainError);
  try {
    lerch_phi(0.99, 1.0, {1e-12, 10});
    FAIL() << "expected budget exhaustion";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.terms(), 10);
    EXPECT_GT(e.achieved_bound(), 1e-12);
  }
}

TEST(LerchPhi, TailBoundRespected) {
  // tol is an absolute bound on the neglected tail; compare against a tighter evaluation
  for (double tol : {1e-6, 1e-9}) {
    const Complex z(0.8, -0.3);
    const Complex loose = lerch_phi(z, 0.3, {tol, 50'000'000});
    const Complex tight = lerch_phi(z, 0.3, kTight);
    EXPECT_LE(std::abs(loose - tight), tol);
  }
}

TEST(CapL, ZeroAndLogLimit) {
  EXPECT_EQ(cap_L(0.0, 2.0), Complex(0.0));
  EXPECT_NEAR(cap_L(0.5, 0.0).real(), -std::log(1.5), 1e-12);
  const Complex z(-0.4, 0.5);
  EXPECT_LT(std::abs(cap_L(z, 1e-12, kTight) + std::log(1.0 + z)), 1e-10);
}

TEST(CapL, IdentityAgreesWithDirectIntegral) {
  const Complex z = std::polar(0.3, kPi / 4);
  EXPECT_LT(std::abs(cap_L(z, 2.0, kTight) - direct_L(z, 2.0)), 1e-10);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> rad(0.0, 0.95), ang(-kPi, kPi), b(0.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    const Complex w = std::polar(rad(rng), ang(rng));
    const double beta = b(rng);
    EXPECT_LT(std::abs(cap_L(w, beta, kTight) - direct_L(w, beta)), 1e-10) << w << " " << beta;
  }
}

TEST(CapP, ClosedFormAtZeroBeta) {
  EXPECT_NEAR(cap_P(0.5, 0.0).real(), 1.0 / 3, 1e-15);
  const Complex z(0.2, -0.6);
  EXPECT_LT(std::abs(cap_P(z, 0.0) - z / (1.0 + z)), 1e-15);
}

TEST(CapP, ConjugationSymmetry) {
  const Complex z = std::polar(0.4, 1.1);
  EXPECT_LT(std::abs(cap_P(std::conj(z), 2.0, kTight) - std::conj(cap_P(z, 2.0, kTight))), 1e-14);
}

TEST(CapP, SandwichOnRealAxis) {
  const double re = cap_P(std::exp(-0.3), 5.0, kTight).real();
  EXPECT_GE(re, 1.0 / 24);
  EXPECT_LE(re, 1.0 / 6);
}

TEST(CapP, IsMinusZTimesDerivativeOfL) {
  const double h = 1e-5;
  for (const Complex z : {Complex(0.3, 0.2), Complex(-0.5, 0.1), Complex(0.1, -0.7)}) {
    for (double beta : {0.0, 0.7, 6.0}) {
      const Complex dL = (cap_L(z + h, beta, kTight) - cap_L(z - h, beta, kTight)) / (2 * h);
      EXPECT_LT(std::abs(cap_P(z, beta, kTight) + z * dL), 1e-8) << z << " " << beta;
    }
  }
}

TEST(CapP, IntegralRepresentation) {
  const double s = 0.2, th = 1.0, b = 4.0;
  EXPECT_LT(std::abs(cap_P(std::exp(Complex(-s, th)), b, kTight) - integral_P(s, th, b)), 1e-9);
}

TEST(PTheta, Values) {
  EXPECT_NEAR(p_theta(1.0, 0.0).real(), 0.7310585786300049, 1e-15);
  EXPECT_NEAR(std::abs(p_theta_prime(2.0, kPi / 2)), 1 / (2 * std::cosh(2.0)), 1e-15);
  for (double t : {0.01, 0.5, 3.0})
    for (double th : {-3.0, -1.0, 0.0, 2.5, kPi})
      EXPECT_NEAR(std::abs(p_theta_prime(t, th)) * 4 * (std::pow(std::sinh(t / 2), 2) + std::pow(std::cos(th / 2), 2)),
                  1.0, 1e-12);
  EXPECT_THROW(p_theta(0.0, 1.0), DomainError);
  EXPECT_THROW(p_theta_prime(-1.0, 1.0), DomainError);
}

TEST(Bounds, ModulusAndLipschitzOnGrid) {
  for (double s : {1e-3, 0.05, 0.4, 2.0}) {
    for (double b : {1e-2, 0.5, 3.0, 80.0}) {
      for (int k = 0; k < 24; ++k) {
        const double th = -kPi + 2 * kPi * (k + 1) / 24;
        const double m = std::cosh(s) + std::cos(th);
        const Complex p = cap_P(std::exp(Complex(-s, th)), b, kTight);
        EXPECT_LE(std::abs(p), 1 / (2 * b * m) * (1 + 1e-9));
        EXPECT_LE(std::abs(p), 4 + 4 / std::sqrt(m));
        const double s2 = 1.5 * s;
        const Complex p2 = cap_P(std::exp(Complex(-s2, th)), b, kTight);
        EXPECT_LE(std::abs(p2 - p), (s2 - s) / m * (1 + 1e-9));
        EXPECT_LE(std::abs(m * p), std::exp(s) / (b + 1) * (1 + 1e-9));
      }
      const double re0 = cap_P(std::exp(-s), b, kTight).real();
      EXPECT_GE(re0, std::exp(-s) / (4 * (b + 1)));
      EXPECT_LE(re0, 1 / (b + 1));
    }
  }
}

TEST(Asymptotic, SmallBetaErrorIsLinear) {
  const Complex z = -std::exp(-0.5);
  double prev = 0;
  for (double b : {1e-2, 1e-3, 1e-4}) {
    const auto a = phi_asymptotic(z, b, AsymptoticRegime::SmallBeta);
    const double err = std::abs(lerch_phi(z, b, kTight) - a.value);
    EXPECT_LE(err, a.error_bound);
    if (prev > 0) {
      EXPECT_GT(prev / err, 8.0);
      EXPECT_LT(prev / err, 12.0);
    }
    prev = err;
  }
}

TEST(Asymptotic, LargeBetaRemainder) {
  const double xi = 0.4, th = 2.0;
  const Complex z = -std::exp(Complex(-xi, th));
  const double m = std::cosh(xi) + std::cos(th);
  for (double b : {10.0, 100.0}) {
    const auto a = phi_asymptotic(z, b, AsymptoticRegime::LargeBeta);
    const double r = std::abs(lerch_phi(z, b, kTight) - a.value) * b * b * b * std::pow(m, 1.5);
    EXPECT_LE(r, 32.0);
    EXPECT_LE(std::abs(lerch_phi(z, b, kTight) - a.value), a.error_bound);
  }
  EXPECT_EQ(phi_asymptotic(0.0, 25.0, AsymptoticRegime::LargeBeta).value, Complex(1 / 25.0));
}

TEST(Asymptotic, RegimeMisuse) {
  EXPECT_THROW(phi_asymptotic(0.3, 0.5, AsymptoticRegime::SmallBeta), DomainError);
  EXPECT_THROW(phi_asymptotic(0.3, 5.0, AsymptoticRegime::LargeBeta), DomainError);
}

TEST(Summation, ReferenceCases) {
  const auto a = summation_identity_gap(0.5, 0.25, 0.9, 0.0);
  EXPECT_LE(a.gap, 4 * 0.5 / (std::cosh(0.25) + 1));
  EXPECT_TRUE(a.holds());
  EXPECT_TRUE(summation_identity_gap(0.5, 0.25, 0.01, 0.0).holds());
  EXPECT_TRUE(summation_identity_gap(0.5, 0.25, 0.9, kPi - 0.1).holds());
  EXPECT_TRUE(summation_identity_gap(0.01, -0.3, 0.999, 1.0).holds());
}

TEST(Summation, SmallStepApproachesIntegral) {
  // the sum is a Riemann sum of the integral with step a0
  const double tau_c = 0.5;  // tau^(1/a0) fixed so the limit exponent is constant
  double prev = 1e9;
  for (double a0 : {0.2, 0.05, 0.0125}) {
    const auto g = summation_identity_gap(a0, a0 - 0.3, std::pow(tau_c, a0), 0.7);
    EXPECT_LT(g.gap, prev);
    prev = g.gap;
  }
}

TEST(Summation, DomainErrors) {
  EXPECT_THROW(summation_identity_gap(0.0, -1, 0.5, 0), DomainError);
  EXPECT_THROW(summation_identity_gap(0.5, 0.5, 0.5, 0), DomainError);
  EXPECT_THROW(summation_identity_gap(0.5, 0.1, 1.0, 0), DomainError);
  EXPECT_THROW(summation_identity_gap(0.5, 0.1, 0.0, 0), DomainError);
}
