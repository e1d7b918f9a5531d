#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "doctest.h"
#include "doi/distributions.hpp"
#include "doi/rng.hpp"

using namespace doi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <class F>
Moments sample_moments(std::size_t n, F&& draw) {
  double s = 0.0;
  double ss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double v = draw();
    s += v;
    ss += v * v;
  }
  const double m = s / static_cast<double>(n);
  return {m, ss / static_cast<double>(n) - m * m};
}

}  // namespace

TEST_CASE("seed derivation separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t c = 0; c < 8; ++c)
    for (std::uint64_t i = 0; i < 200; ++i) seen.insert(derive_seed(42, c, i));
  CHECK(seen.size() == 8 * 200);
  CHECK(derive_seed(42, 3, 7) == derive_seed(42, 3, 7));
  CHECK(derive_seed(42, 3, 7) != derive_seed(43, 3, 7));
}

TEST_CASE("uniform stays inside the open interval") {
  Rng rng(1);
  for (int t = 0; t < 100000; ++t) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("gamma, inverse gamma and beta moments") {
  Rng rng(3);
  const std::size_t n = 200000;
  {
    // Gamma(2.5, scale 1.5): mean 3.75, variance 5.625.
    const auto m = sample_moments(n, [&] { return rng.gamma(2.5, 1.5); });
    CHECK(std::abs(m.mean - 3.75) < 4 * std::sqrt(5.625 / n));
    CHECK(m.var == doctest::Approx(5.625).epsilon(0.03));
  }
  {
    // Shape below one goes through the boost.
    const auto m = sample_moments(n, [&] { return rng.gamma(0.3, 2.0); });
    CHECK(std::abs(m.mean - 0.6) < 4 * std::sqrt(1.2 / n));
  }
  {
    // IG(5, 4): mean 1, variance 1/3.
    const auto m = sample_moments(n, [&] { return rng.inv_gamma(5.0, 4.0); });
    CHECK(std::abs(m.mean - 1.0) < 4 * std::sqrt((1.0 / 3.0) / n));
  }
  {
    // Beta(2, 5): mean 2/7, variance 10/392.
    const auto m = sample_moments(n, [&] { return rng.beta(2.0, 5.0); });
    CHECK(std::abs(m.mean - 2.0 / 7.0) < 4 * std::sqrt((10.0 / 392.0) / n));
    CHECK(m.var == doctest::Approx(10.0 / 392.0).epsilon(0.03));
  }
}

TEST_CASE("categorical draws follow the weights, in linear and log space") {
  Rng rng(8);
  const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
  std::vector<double> lw;
  for (double v : w) lw.push_back(v > 0 ? std::log(v) - 800.0 : -kInf);  // far below exp underflow
  std::vector<double> c1(4, 0.0);
  std::vector<double> c2(4, 0.0);
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    c1[rng.categorical(w)] += 1;
    c2[rng.categorical_log(lw)] += 1;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const double sd = std::sqrt(w[k] * (1 - w[k]) / n);
    CHECK(std::abs(c1[k] / n - w[k]) <= 4 * sd + 1e-12);
    CHECK(std::abs(c2[k] / n - w[k]) <= 4 * sd + 1e-12);
  }
}

TEST_CASE("truncated normal") {
  Rng rng(11);
  const std::size_t n = 100000;
  {
    const auto m = sample_moments(n, [&] { return sample_truncated_normal(rng, 0.0, 1.0, -kInf, kInf); });
    CHECK(std::abs(m.mean) < 0.02);
  }
  {
    const auto m = sample_moments(n, [&] { return sample_truncated_normal(rng, 0.0, 1.0, 0.0, kInf); });
    CHECK(std::abs(m.mean - std::sqrt(2.0 / std::numbers::pi)) < 0.02);
  }
  {
    double lo = kInf;
    for (int t = 0; t < 10000; ++t) {
      const double v = sample_truncated_normal(rng, 0.0, 1.0, 8.0, kInf);
      REQUIRE(std::isfinite(v));
      lo = std::min(lo, v);
    }
    CHECK(lo >= 8.0);
  }
  {
    // Two-sided interval against the closed-form mean of a truncated N(1, 4) on (0, 2).
    const double mu = 1.0;
    const double s = 2.0;
    const double a = (0.0 - mu) / s;
    const double b = (2.0 - mu) / s;
    auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); };
    const double z = normal_cdf(b) - normal_cdf(a);
    const double mean = mu + s * (phi(a) - phi(b)) / z;
    const auto m = sample_moments(n, [&] { return sample_truncated_normal(rng, mu, s * s, 0.0, 2.0); });
    CHECK(std::abs(m.mean - mean) < 0.01);
  }
  {
    // Upper tail on the negative side, far from the mean.
    for (int t = 0; t < 1000; ++t) REQUIRE(sample_truncated_normal(rng, 3.0, 0.25, -kInf, -5.0) <= -5.0);
  }
  CHECK_THROWS(sample_truncated_normal(rng, 0.0, 1.0, 1.0, 1.0));
  CHECK_THROWS(sample_truncated_normal(rng, 0.0, -1.0, 0.0, 1.0));
}

TEST_CASE("log densities") {
  CHECK(log_normal_pdf(1.0, 0.0, 1.0) == doctest::Approx(-0.5 - 0.5 * std::log(2 * std::numbers::pi)));
  CHECK(log_gamma_pdf(1.0, 1.0, 1.0) == doctest::Approx(-1.0));
  CHECK(log_beta_pdf(0.5, 1.0, 1.0) == doctest::Approx(0.0));
  CHECK(log_beta_pdf(0.25, 2.0, 1.0) == doctest::Approx(std::log(0.5)));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
}
