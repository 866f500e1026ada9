#pragma once

#include "dagmono/rng.hpp"

namespace dagmono {

/// log of the standard normal upper tail, log P[Z > x], accurate for all
/// finite x (continued fraction beyond x = 30).
double log_normal_tail(double x);

/// log P[a < Z < b] for a < b.
double log_normal_interval(double a, double b);

/// Exact inverse-CDF draw of a standard normal conditioned on [a, b].
double sample_truncated_normal(double a, double b, Rng& rng);

/// P[Z <= x] restricted to [a, b] and renormalized.
double truncated_normal_cdf(double x, double a, double b);

}  // namespace dagmono
