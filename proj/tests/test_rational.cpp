#include <gtest/gtest.h>

#include "selfaffine/rational.hpp"

using namespace selfaffine;

TEST(Rational, ParsesFractionsAndIntegers) {
  EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
  EXPECT_EQ(parse_rational("-2/6"), Rational(-1, 3));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(to_string(parse_rational("-6/4")), "-3/2");
  EXPECT_EQ(to_string(Rational(5)), "5");
}

TEST(Rational, RejectsDecimalsAndGarbage) {
  EXPECT_THROW(parse_rational("0.5"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
}

TEST(Rational, FracAndIntegrality) {
  EXPECT_EQ(frac(Rational(7, 4)), Rational(3, 4));
  EXPECT_EQ(frac(Rational(-1, 4)), Rational(3, 4));
  EXPECT_TRUE(is_integer(parse_rational("8/4")));
  EXPECT_FALSE(is_integer(Rational(3, 2)));
  EXPECT_EQ(from_double(0.375), Rational(3, 8));
}

TEST(RationalMatrix, DeterminantInverseAgainstHandComputation) {
  // [[2,1],[1,1]] has det 1 and inverse [[1,-1],[-1,2]].
  const auto m = RationalMatrix::from_rows({{2, 1}, {1, 1}});
  EXPECT_EQ(m.determinant(), Rational(1));
  EXPECT_EQ(m.inverse(), RationalMatrix::from_rows({{1, -1}, {-1, 2}}));
  EXPECT_EQ(m * m.inverse(), RationalMatrix::identity(2));
  const auto s = RationalMatrix::from_rows({{1, 2}, {2, 4}});
  EXPECT_EQ(s.rank(), 1u);
  EXPECT_THROW(s.inverse(), std::domain_error);
}

TEST(RationalMatrix, SolveAndRank) {
  const auto a = RationalMatrix::from_rows({{3, 0, 0}, {0, 3, 0}, {1, 0, 3}});
  const RationalVector b{3, 6, 10};
  const auto x = solve(a, b);
  EXPECT_EQ(a * x, b);
  EXPECT_EQ(rank_of({{1, 1, 0}, {1, 0, 1}, {0, 1, 1}}), 3u);
  EXPECT_EQ(rank_of({{1, -1}, {-1, 1}}), 1u);
}
