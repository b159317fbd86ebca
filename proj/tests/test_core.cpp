#include <gtest/gtest.h>

#include "ouspec/core.hpp"

using namespace ou;

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_rational("1/8"), Rational(1) / 8);
  EXPECT_EQ(parse_rational("-3"), Rational(-3));
  EXPECT_EQ(parse_rational("-0.5"), Rational(-1) / 2);
  EXPECT_EQ(parse_rational("2.5e-1"), Rational(1) / 4);
  EXPECT_EQ(parse_rational(" 6/4 "), Rational(3) / 2);
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "abc", "1/0", "1//2", "0x10", "1.2.3"}) {
    EXPECT_THROW(parse_rational(bad), Error) << bad;
  }
}

TEST(Rational, RendersLowestTerms) {
  EXPECT_EQ(to_string(Rational(2) / 16), "1/8");
  EXPECT_EQ(to_string(Rational(-4) / 2), "-2");
  EXPECT_EQ(to_string(Rational(0)), "0");
}

TEST(Rational, DoubleConversionUsesShortestDecimal) {
  EXPECT_EQ(rational_from_double(0.1), Rational(1) / 10);
  EXPECT_EQ(rational_from_double(-2.0), Rational(-2));
  EXPECT_THROW(rational_from_double(std::nan("")), Error);
}

TEST(Error, CarriesKindAndBareMessage) {
  const Error e(ErrorKind::not_hurwitz, "eigenvalue 1");
  EXPECT_EQ(e.kind(), ErrorKind::not_hurwitz);
  EXPECT_EQ(e.message(), "eigenvalue 1");
  EXPECT_EQ(std::string(e.what()), "NotHurwitz: eigenvalue 1");
}

TEST(Cast, RationalMatrixToDoubleAndComplex) {
  RationalMatrix m(1, 2);
  m << Rational(1) / 4, Rational(-3);
  const Eigen::MatrixXd d = matrix_cast<double>(m);
  EXPECT_DOUBLE_EQ(d(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(d(0, 1), -3.0);
  const Eigen::MatrixXcd c = matrix_cast<Complex>(m);
  EXPECT_EQ(c(0, 1), Complex(-3.0, 0.0));
}
