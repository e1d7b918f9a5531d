#include "doi/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace doi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard normal restricted to [a, inf) with a >= 0 (Robert 1995).
double lower_tail(Rng& rng, double a, double b) {
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(rng.uniform()) / rate;
    if (z > b) continue;
    const double d = z - rate;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return z;
  }
}

// Standard normal restricted to [a, b] by uniform proposals; `peak` is the
// point of [a, b] closest to zero.
double bounded_uniform(Rng& rng, double a, double b, double peak) {
  for (;;) {
    const double z = a + (b - a) * rng.uniform();
    if (std::log(rng.uniform()) <= 0.5 * (peak * peak - z * z)) return z;
  }
}

double standard_truncated(Rng& rng, double a, double b) {
  if (b <= 0.0) return -standard_truncated(rng, -b, -a);
  if (a >= 0.0) {
    // Narrow windows relative to the local decay scale 1/a favour uniform proposals.
    if (std::isfinite(b) && (b - a) * std::max(a, 1.0) <= 1.0) return bounded_uniform(rng, a, b, a);
    return lower_tail(rng, a, b);
  }
  // a < 0 < b
  if (b - a >= std::sqrt(2.0 * std::numbers::pi)) {
    for (;;) {
      const double z = rng.normal();
      if (z >= a && z <= b) return z;
    }
  }
  return bounded_uniform(rng, a, b, 0.0);
}

}  // namespace

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

double log_gamma_pdf(double x, double shape, double scale) {
  if (x <= 0.0) return -kInf;
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

double log_beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return -kInf;
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) - std::lgamma(a) -
         std::lgamma(b);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double sample_truncated_normal(Rng& rng, double mean, double var, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("truncated normal: lower bound must be below upper bound");
  if (!(var > 0.0)) throw std::invalid_argument("truncated normal: variance must be positive");
  const double sd = std::sqrt(var);
  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  if (a == -kInf && b == kInf) return mean + sd * rng.normal();
  double x = mean + sd * standard_truncated(rng, a, b);
  // Guard the open support against rounding in the affine map.
  if (x <= lo) x = std::nextafter(lo, kInf);
  if (x >= hi) x = std::nextafter(hi, -kInf);
  return x;
}

}  // namespace doi
