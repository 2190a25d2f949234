#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "selfaffine/affine_system.hpp"

using namespace selfaffine;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Validation, Scale4PassesEveryMandatoryAxiom) {
  const auto rep = validate_system(catalog_system("scale4"));
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.L_integer);
  EXPECT_TRUE(rep.N_below_det);
  EXPECT_LE(rep.hadamard_defect, 1e-12);
}

TEST(Validation, TriadicFailsCompatibilityAtFirstPower) {
  const auto rep = validate_system(catalog_system("triadic"));
  EXPECT_FALSE(rep.passed());
  EXPECT_TRUE(rep.hadamard);  // the (B, L) pair itself is Hadamard
  ASSERT_FALSE(rep.compatibility_failures.empty());
  EXPECT_EQ(rep.compatibility_failures.front().n, 1);
  EXPECT_EQ(rep.compatibility_failures.front().value, Rational(3, 2));
}

TEST(Validation, NonExpansiveAndNonHadamardAreReported) {
  const AffineSystem shrink(ScalingMatrix::scalar(1, Rational(1, 2)), {Point{0}, Point{Rational(1, 2)}},
                            {Point{0}, Point{1}});
  EXPECT_FALSE(validate_system(shrink).expansive);
  const AffineSystem bad(ScalingMatrix::scalar(1, 4), {Point{0}, Point{Rational(1, 3)}}, {Point{0}, Point{1}});
  const auto rep = validate_system(bad);
  EXPECT_FALSE(rep.hadamard);
  // |1 + e^{2 pi i/3}|/2 = 1/2 off the diagonal of H*H
  EXPECT_NEAR(rep.hadamard_defect, 0.5, 1e-12);
}

TEST(Validation, RotationScalingIsExpansive) {
  // R = [[0,-2],[2,0]] has eigenvalues +-2i
  const ScalingMatrix r(RationalMatrix::from_rows({{0, -2}, {2, 0}}));
  EXPECT_NEAR(r.min_eigenvalue_modulus(), 2.0, 1e-12);
  EXPECT_TRUE(r.is_expansive());
}

TEST(Hadamard, Scale4MatrixIsTheTwoPointDft) {
  const auto sys = catalog_system("scale4");
  const auto h = hadamard_matrix(sys.B(), sys.L());
  const double s = 1 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(h(0, 0) - s), 0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 1) + s), 0, 1e-15);
  EXPECT_LE(unitarity_defect(h), 1e-15);
}

TEST(Chi, MatchesCosineFormForTwoDigits) {
  const auto sys = catalog_system("scale4");
  for (double t : {-1.3, -0.25, 0.0, 0.4, 2.75}) {
    const auto v = chi_B(sys, std::span<const double>(&t, 1));
    EXPECT_NEAR(std::abs(v), std::abs(std::cos(kPi * t / 2)), 1e-14);
  }
  EXPECT_NEAR(std::abs(chi_B(sys, Point{Rational(1)})), 0.0, 1e-15);
}

TEST(Chi, GradientMatchesFiniteDifferences) {
  const auto sys = catalog_system("eiffel(2)");
  const std::vector<double> t{0.13, -0.4, 0.27};
  const auto g = chi_B_sq_gradient(sys, t);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    auto p = t, m = t;
    p[j] += h;
    m[j] -= h;
    const double fd = (std::norm(chi_B(sys, p)) - std::norm(chi_B(sys, m))) / (2 * h);
    EXPECT_NEAR(g(j), fd, 1e-7);
  }
}

TEST(Maps, InversePairsComposeToIdentity) {
  const auto sys = catalog_system("eiffel(3)");
  const Point x{Rational(1, 5), Rational(-2, 7), Rational(3)};
  for (const auto& b : sys.B()) EXPECT_EQ(map_sigma(sys, b, map_omega(sys, b, x)), x);
  for (const auto& l : sys.L()) EXPECT_EQ(map_rho(sys, l, map_tau(sys, l, x)), x);
  EXPECT_THROW(map_sigma(sys, Point{Rational(1), Rational(0), Rational(0)}, x), std::invalid_argument);
}

TEST(SystemIo, JsonRoundTrip) {
  const auto sys = catalog_system("planar-collapse");
  const auto back = parse_system_json(system_to_json(sys));
  EXPECT_EQ(back.B(), sys.B());
  EXPECT_EQ(back.L(), sys.L());
  EXPECT_EQ(back.R().matrix(), sys.R().matrix());
}

TEST(SystemIo, RejectsFloatsAndShapeErrors) {
  EXPECT_THROW(parse_system_json(R"({"dim":1,"R":[["4"]],"B":[["0"],[0.5]],"L":[["0"],["1"]]})"), StructuralError);
  EXPECT_THROW(parse_system_json(R"({"dim":2,"R":[["4"]],"B":[["0"]],"L":[["0"]]})"), StructuralError);
  EXPECT_THROW(parse_system_json(R"({"dim":1,"R":[["4"]],"B":[["0"],["1/2"]],"L":[["0"]]})"), StructuralError);
  EXPECT_THROW(parse_system_json("{not json"), StructuralError);
  EXPECT_THROW(load_system_file("/nonexistent/system.json"), StructuralError);
  // integer JSON numbers are exact and allowed
  EXPECT_NO_THROW(parse_system_json(R"({"dim":1,"R":[[4]],"B":[[0],["1/2"]],"L":[[0],[1]]})"));
}

TEST(Catalog, NamesAndErrors) {
  EXPECT_EQ(catalog_system("eiffel(5)").R().matrix()(2, 2), Rational(5));
  EXPECT_EQ(catalog_system("two-digit(3,1/2)").L()[1][0], Rational(1));
  try {
    catalog_system("nope");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("available"), std::string::npos);
  }
  for (const auto& [name, sys] : builtin_catalog()) EXPECT_TRUE(validate_system(sys).structurally_sound()) << name;
}
