#include "dagmono/normal.hpp"

#include <cmath>
#include <numbers>

#include "dagmono/errors.hpp"

namespace dagmono {
namespace {

constexpr double kTailSwitch = 30.0;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Mills ratio P[Z > x] / phi(x) for x >= kTailSwitch, by the continued
/// fraction 1/(x + 1/(x + 2/(x + 3/(x + ...)))).
double mills_ratio_far(double x) {
  double tail = x;
  for (int k = 60; k >= 1; --k) tail = x + k / tail;
  return 1.0 / tail;
}

/// d/dx log P[Z > x] = -phi(x) / P[Z > x].
double log_tail_slope(double x, double log_tail) {
  return -std::exp(-0.5 * x * x - kLogSqrt2Pi - log_tail);
}

/// Draw from Z | a <= Z <= b with 0 <= a < b by solving
/// log P[Z > t] = log(P[Z > a] - u (P[Z > a] - P[Z > b])).
double sample_upper(double a, double b, double u) {
  const double la = log_normal_tail(a);
  const double lb = log_normal_tail(b);
  const double target = la + std::log1p(-u * -std::expm1(lb - la));
  double lo = a;
  double hi = b;
  double t = a + 0.5 * (b - a);
  if (a > 1.0) t = std::min(b, a + (-std::log1p(-u * -std::expm1(lb - la))) / a);
  for (int iter = 0; iter < 200; ++iter) {
    const double lt = log_normal_tail(t);
    const double g = lt - target;
    if (g > 0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = t - g / log_tail_slope(t, lt);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t)) || hi - lo <= 1e-15 * (1.0 + std::abs(t))) {
      return next;
    }
    t = next;
  }
  return t;
}

}  // namespace

double log_normal_tail(double x) {
  if (x < kTailSwitch) return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
  return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio_far(x));
}

double log_normal_interval(double a, double b) {
  if (!(a < b)) throw InputError("normal interval needs a < b");
  if (a >= 0) {
    const double la = log_normal_tail(a);
    return la + std::log1p(-std::exp(log_normal_tail(b) - la));
  }
  if (b <= 0) return log_normal_interval(-b, -a);
  // a < 0 < b: 1 - P[Z < a] - P[Z > b], each term below 1/2.
  return std::log1p(-(std::exp(log_normal_tail(-a)) + std::exp(log_normal_tail(b))));
}

double sample_truncated_normal(double a, double b, Rng& rng) {
  if (!(a < b)) throw InputError("truncated normal needs a < b");
  if (a >= 0) return sample_upper(a, b, rng.uniform01());
  if (b <= 0) return -sample_upper(-b, -a, rng.uniform01());
  // Split at 0 and pick a half by its exact mass.
  const double left = std::exp(log_normal_interval(a, 0.0));
  const double right = std::exp(log_normal_interval(0.0, b));
  if (rng.uniform01() * (left + right) < left) return -sample_upper(0.0, -a, rng.uniform01());
  return sample_upper(0.0, b, rng.uniform01());
}

double truncated_normal_cdf(double x, double a, double b) {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  return std::exp(log_normal_interval(a, x) - log_normal_interval(a, b));
}

}  // namespace dagmono
