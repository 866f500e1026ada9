#include <doctest.h>

#include <cstdint>
#include <limits>

#include "dagmono/errors.hpp"
#include "dagmono/rational.hpp"
#include "dagmono/rng.hpp"

using namespace dagmono;

TEST_CASE("lowest terms and sign normalization") {
  const Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(r.str() == "-3/2");
  CHECK(Rational(4, 2).str() == "2");
  CHECK_THROWS_AS(Rational(1, 0), InputError);
}

TEST_CASE("arithmetic and ordering") {
  const Rational a(1, 2);
  const Rational b(1, 3);
  CHECK(a + b == Rational(5, 6));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 6));
  CHECK(a / b == Rational(3, 2));
  CHECK(b < a);
  CHECK(-a < b);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(-7, 2).ceil() == -3);
  CHECK(Rational(7, 2).floor() == 3);
}

TEST_CASE("parse accepts integers, fractions and decimals") {
  CHECK(Rational::parse("5") == Rational(5));
  CHECK(Rational::parse("-3/9") == Rational(-1, 3));
  CHECK(Rational::parse("-0.375") == Rational(-3, 8));
  CHECK(Rational::parse("0.1") == Rational(1, 10));
  CHECK_THROWS_AS(Rational::parse("1/0"), InputError);
  CHECK_THROWS_AS(Rational::parse("abc"), InputError);
}

TEST_CASE("from_double is exact on dyadics") {
  CHECK(Rational::from_double(0.125) == Rational(1, 8));
  CHECK(Rational::from_double(-3.0) == Rational(-3));
}

TEST_CASE("overflow is reported, not wrapped") {
  const Rational big(std::numeric_limits<std::int64_t>::max());
  CHECK_THROWS_AS(big + Rational(1), OverflowError);
  CHECK_THROWS_AS(big * Rational(2), OverflowError);
  CHECK_NOTHROW(big * Rational(1, 2));
}

TEST_CASE("comparison agrees with long double on random fractions") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto n1 = static_cast<std::int64_t>(rng.uniform_index(2001)) - 1000;
    const auto d1 = static_cast<std::int64_t>(rng.uniform_index(999)) + 1;
    const auto n2 = static_cast<std::int64_t>(rng.uniform_index(2001)) - 1000;
    const auto d2 = static_cast<std::int64_t>(rng.uniform_index(999)) + 1;
    const bool exact_less = Rational(n1, d1) < Rational(n2, d2);
    // Cross-multiplication in plain integers is an independent oracle here.
    CHECK(exact_less == (n1 * d2 < n2 * d1));
  }
}

TEST_CASE("substreams are deterministic and distinct") {
  CHECK(substream_seed(1, 2) == substream_seed(1, 2));
  CHECK(substream_seed(1, 2) != substream_seed(1, 3));
  CHECK(substream_seed(1, 2) != substream_seed(2, 2));
  Rng a(substream_seed(9, 0));
  Rng b(substream_seed(9, 0));
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("mt19937_64 engine matches the standard's reference value") {
  // The standard fixes the 10000th output for the default seed.
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next_u64();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("uniform_index stays in range and covers it") {
  Rng rng(11);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.uniform_index(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);
}
