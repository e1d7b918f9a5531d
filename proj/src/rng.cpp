#include "doi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace doi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t component, std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(component + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(index + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

double Rng::uniform() {
  // 53 random mantissa bits, shifted off zero.
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("gamma: shape and scale must be > 0");
  // Marsaglia-Tsang, with the shape < 1 boost.
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0, 1.0);
    return scale * g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

double Rng::inv_gamma(double shape, double scale) { return 1.0 / gamma(shape, 1.0 / scale); }

double Rng::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  const double s = x + y;
  if (s > 0.0) return x / s;
  // Both shapes tiny and both draws underflowed; fall back on the limiting two-point law.
  return uniform() < a / (a + b) ? 1.0 : 0.0;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("categorical: weights sum to zero");
  double u = uniform() * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    u -= weights[k];
    if (u <= 0.0) return k;
  }
  // Rounding left a sliver; return the last positive weight.
  for (std::size_t k = weights.size(); k-- > 0;)
    if (weights[k] > 0.0) return k;
  return weights.size() - 1;
}

std::size_t Rng::categorical_log(std::span<const double> log_weights) {
  const double mx = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(mx)) throw std::invalid_argument("categorical_log: no finite log weight");
  std::vector<double> w(log_weights.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(log_weights[k] - mx);
  return categorical(w);
}

}  // namespace doi
