#include <cmath>

#include "pspi/symbol.hpp"
#include "support.hpp"

using namespace pspi;

TEST_CASE("parse the config forms") {
  CHECK(PolynomialSymbol::parse("0").is_zero());
  CHECK(PolynomialSymbol::parse("(p^2+q^2)/2") == PolynomialSymbol::harmonic());
  CHECK(PolynomialSymbol::parse("q^2/2") == PolynomialSymbol({{0, 2, 0.5}}));
  CHECK(PolynomialSymbol::parse("0.25*q^4 - q") == PolynomialSymbol({{0, 4, 0.25}, {0, 1, -1.0}}));
  CHECK(PolynomialSymbol::parse("2 p q") == PolynomialSymbol({{1, 1, 2.0}}));
  CHECK(PolynomialSymbol::parse("-(p - q)^2") == PolynomialSymbol({{2, 0, -1.0}, {1, 1, 2.0}, {0, 2, -1.0}}));
  CHECK(PolynomialSymbol::parse("q - q").is_zero());
}

TEST_CASE("parse errors are reported") {
  for (const char* bad : {"", "p^", "x", "(p+q", "q/0", "p/q", "q^-1", "1 +", "p)"})
    CHECK_THROWS_KIND(PolynomialSymbol::parse(bad), ErrorKind::Parse);
}

TEST_CASE("canonical text round-trips") {
  for (const char* s : {"0", "(p^2+q^2)/2", "0.1*q^3 - 7*p*q + 1e-3", "-p + 3"}) {
    const PolynomialSymbol h = PolynomialSymbol::parse(s);
    CHECK(PolynomialSymbol::parse(h.to_string()) == h);
  }
}

TEST_CASE("evaluation at real and complex arguments") {
  const PolynomialSymbol h = PolynomialSymbol::parse("(p^2+q^2)/2 + p*q^2");
  CHECK(h(1.0, 2.0) == doctest::Approx(6.5));
  const std::complex<double> p(0.5, -1.0), q(1.0, 2.0);
  const std::complex<double> expect = 0.5 * (p * p + q * q) + p * q * q;
  CHECK(std::abs(h(p, q) - expect) <= 1e-14);
  CHECK(h.degree() == 3);
  CHECK(h.depends_on_p());
}

TEST_CASE("q coefficients") {
  const auto c = PolynomialSymbol::parse("1 - q + q^2/2").q_coefficients();
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == -1.0);
  CHECK(c[2] == 0.5);
  CHECK_THROWS_KIND(PolynomialSymbol::harmonic().q_coefficients(), ErrorKind::UnsupportedSymbol);
}

TEST_CASE("term lists reject duplicate exponents") {
  CHECK_THROWS_KIND(PolynomialSymbol({{1, 0, 1.0}, {1, 0, 2.0}}), ErrorKind::InvalidConfig);
  CHECK_THROWS_KIND(PolynomialSymbol({{-1, 0, 1.0}}), ErrorKind::InvalidConfig);
}
