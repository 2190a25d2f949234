#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "selfaffine/fractal_measure.hpp"

using namespace selfaffine;

namespace {
constexpr double kPi = std::numbers::pi;

std::complex<double> ft1(const AffineSystem& s, double t) {
  return mu_hat_adaptive(s, std::span<const double>(&t, 1)).value;
}
}  // namespace

TEST(FourierTransform, Scale2IsLebesgueOnUnitInterval) {
  const auto sys = catalog_system("scale2");
  for (double t : {0.3, -1.7, 4.25, 9.9}) {
    EXPECT_NEAR(std::abs(ft1(sys, t)), std::abs(std::sin(kPi * t) / (kPi * t)), 1e-9);
    EXPECT_NEAR(std::abs(ft1(sys, t) - mu2_closed_form(t)), 0.0, 1e-9);
  }
  EXPECT_EQ(mu2_closed_form(0.0), std::complex<double>(1.0));
}

TEST(FourierTransform, TailBoundDominatesTruncationError) {
  const auto sys = catalog_system("scale4");
  const FourierEvaluator ev(sys);
  for (double t : {0.7, 5.0, 40.0}) {
    const auto deep = ev.evaluate(std::span<const double>(&t, 1), 80).value;
    for (int d : {2, 5, 10}) {
      const auto e = ev.evaluate(std::span<const double>(&t, 1), d);
      EXPECT_LE(std::abs(e.value - deep), e.tail_bound + 1e-15) << t << " " << d;
    }
    EXPECT_LE(ev(std::span<const double>(&t, 1)).tail_bound, 1e-10);
  }
}

TEST(FourierTransform, AtomQuadratureReproducesTruncatedProduct) {
  // The depth-d atomic measure has transform prod_{n<d} chi_B(R*^-n t) exactly.
  const auto sys = catalog_system("eiffel(3)");
  const std::vector<double> t{0.4, -1.1, 2.3};
  const auto q = integrate_complex(
      sys,
      [&](std::span<const double> x) {
        return std::polar(1.0, 2 * kPi * (t[0] * x[0] + t[1] * x[1] + t[2] * x[2]));
      },
      6);
  EXPECT_NEAR(std::abs(q - mu_hat(sys, t, 6).value), 0.0, 1e-12);
}

TEST(FourierTransform, TriadicMagnitudeRelation) {
  // chi_B(1/2) has modulus 1/2 and the rest of the product is mu_hat(1/6).
  const auto sys = catalog_system("triadic");
  EXPECT_NEAR(std::abs(ft1(sys, 0.5)), 0.5 * std::abs(ft1(sys, 1.0 / 6)), 1e-10);
}

TEST(FourierTransform, NonContractingSystemIsRejected) {
  const AffineSystem bad(ScalingMatrix::scalar(1, Rational(1, 2)), {Point{0}, Point{1}}, {Point{0}, Point{1}});
  EXPECT_THROW(FourierEvaluator{bad}, std::domain_error);
}

TEST(Moments, LebesgueMomentsAreReciprocals) {
  const auto m = moments(catalog_system("scale2"), 6);
  for (int k = 0; k <= 6; ++k) EXPECT_EQ(m.at({k}), Rational(1, k + 1));
}

TEST(Moments, QuarterCantorFirstTwoMoments) {
  // x = x'/4 + b: E x = (1/4)/(3/4), E x^2 (15/16) = 2 (1/4)(1/3)/4 + 1/8.
  const auto sys = catalog_system("scale4");
  const auto m = moments(sys, 2);
  EXPECT_EQ(m.at({1}), Rational(1, 3));
  EXPECT_EQ(m.at({2}), Rational(8, 45));
  const double quad = integrate(sys, [](std::span<const double> x) { return x[0] * x[0]; }, 14);
  EXPECT_NEAR(quad, 8.0 / 45, 1e-7);
}

TEST(Moments, MixedMomentsMatchQuadratureIn3d) {
  const auto sys = catalog_system("eiffel(2)");
  const auto m = moments(sys, 2);
  const double quad = integrate(sys, [](std::span<const double> x) { return x[0] * x[1]; }, 10);
  EXPECT_NEAR(m.at({1, 1, 0}).get_d(), quad, 1e-3);
}

TEST(Convolution, TransformIsProduct) {
  const auto a = catalog_system("triadic"), b = catalog_system("scale4");
  const auto f = convolve(fourier_transform(a), fourier_transform(b));
  const double t = -0.37;
  EXPECT_NEAR(std::abs(f(std::span<const double>(&t, 1)).value - ft1(a, t) * ft1(b, t)), 0.0, 1e-12);
}

TEST(Convolution, SecondMomentOfMu3StarMu4) {
  // E x^2 = 3/8 (mu3), E y^2 = 8/45 (mu4), E x = 1/2, E y = 1/3.
  const ConvolutionMeasure conv({catalog_system("triadic"), catalog_system("scale4")});
  EXPECT_EQ(conv.coordinate_second_moment(0), Rational(3, 8) + Rational(1, 3) + Rational(8, 45));
}

TEST(ZeroSet, QuarterScaleMembership) {
  const auto z = zero_set_predicate("mu4");
  for (int v : {1, 3, 4, 12, 16, -5}) EXPECT_TRUE(zero_set_member(z, Rational(v))) << v;
  for (int v : {0, 2, 6, 8}) EXPECT_FALSE(zero_set_member(z, Rational(v))) << v;
  EXPECT_FALSE(zero_set_member(z, Rational(1, 2)));
}

TEST(ZeroSet, AgreesWithNumericZeros) {
  const auto sys = catalog_system("scale4");
  const auto z = zero_set_predicate(sys);
  for (int k = 1; k <= 40; ++k) {
    const bool zero = std::abs(ft1(sys, k)) < 1e-9;
    EXPECT_EQ(zero, zero_set_member(z, Rational(k))) << k;
  }
}

TEST(Growth, ExponentialBoundHolds) {
  const auto sys = catalog_system("scale4");
  const std::vector<std::pair<double, double>> samples{{0.0, 1.0}, {2.0, -1.5}, {-3.0, 0.5}};
  const auto rep = growth_bound_check(sys, samples);
  EXPECT_TRUE(rep.ok);
  EXPECT_NEAR(rep.diameter, 2.0 / 3, 1e-9);
}
