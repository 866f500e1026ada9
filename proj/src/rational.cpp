#include "dagmono/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "dagmono/errors.hpp"

namespace dagmono {
namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(i128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw InputError("malformed rational: '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InputError("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(i128 num, i128 den) {
  if (den == 0) throw InputError("division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits64(num) || !fits64(den)) throw OverflowError("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

double Rational::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t Rational::ceil() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw InputError("empty rational literal");

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash), whole),
                    parse_int(text.substr(slash + 1), whole));
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = false;
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
      negative = int_part.front() == '-';
      int_part.remove_prefix(1);
    }
    if (frac_part.size() > 18) throw OverflowError("too many decimals: '" + std::string(whole) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    const std::int64_t ip = int_part.empty() ? 0 : parse_int(int_part, whole);
    const std::int64_t fp = frac_part.empty() ? 0 : parse_int(frac_part, whole);
    if (ip < 0 || fp < 0) throw InputError("malformed rational: '" + std::string(whole) + "'");
    Rational r = Rational(ip) + Rational(fp, scale);
    return negative ? -r : r;
  }
  return Rational(parse_int(text, whole));
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) throw InputError("non-finite value cannot be exact");
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // Scale the mantissa up to an integer, tracking the binary exponent.
  std::int64_t steps = 0;
  while (mantissa != std::floor(mantissa)) {
    mantissa *= 2.0;
    ++steps;
    if (steps > 1100) throw OverflowError("double not exactly representable");
  }
  const std::int64_t shift = static_cast<std::int64_t>(exponent) - steps;
  if (std::fabs(mantissa) > 9.0e18) throw OverflowError("double not exactly representable");
  auto num = static_cast<i128>(mantissa);
  i128 den = 1;
  if (shift >= 0) {
    if (shift > 62) throw OverflowError("double not exactly representable");
    num <<= shift;
  } else {
    if (-shift > 62) throw OverflowError("double not exactly representable");
    den <<= -shift;
  }
  return from_wide(num, den);
}

Rational& Rational::operator+=(const Rational& rhs) {
  const i128 num = static_cast<i128>(num_) * rhs.den_ + static_cast<i128>(rhs.num_) * den_;
  const i128 den = static_cast<i128>(den_) * rhs.den_;
  return *this = from_wide(num, den);
}

Rational& Rational::operator-=(const Rational& rhs) {
  const i128 num = static_cast<i128>(num_) * rhs.den_ - static_cast<i128>(rhs.num_) * den_;
  const i128 den = static_cast<i128>(den_) * rhs.den_;
  return *this = from_wide(num, den);
}

Rational& Rational::operator*=(const Rational& rhs) {
  return *this = from_wide(static_cast<i128>(num_) * rhs.num_,
                           static_cast<i128>(den_) * rhs.den_);
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.num_ == 0) throw InputError("division by zero");
  return *this = from_wide(static_cast<i128>(num_) * rhs.den_,
                           static_cast<i128>(den_) * rhs.num_);
}

Rational Rational::operator-() const {
  return from_wide(-static_cast<i128>(num_), den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const i128 lhs = static_cast<i128>(a.num_) * b.den_;
  const i128 rhs = static_cast<i128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace dagmono
