#include "doi/estimands.hpp"

#include <algorithm>
#include <cmath>

namespace doi {

std::vector<char> Subgroup::mask(const Dataset& data) const {
  const std::size_t n = data.size();
  std::vector<char> out(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = data.net.neighbors(i);
    if (neighbors && nb.size() != *neighbors) out[i] = 0;
    if (treated_fraction) {
      if (nb.empty()) {
        out[i] = 0;
        continue;
      }
      const auto wt = data.net.weights(i);
      double s = 0.0;
      for (std::size_t k = 0; k < nb.size(); ++k) s += data.z.values[nb[k]] * wt[k];
      if (std::abs(s / static_cast<double>(nb.size()) - *treated_fraction) > fraction_tol) out[i] = 0;
    }
  }
  return out;
}

std::string EstimandQuery::kind_name(Kind k) {
  switch (k) {
    case Kind::kACate:
      return "a_cate";
    case Kind::kACase:
      return "a_case";
    case Kind::kEAte:
      return "e_ate";
    case Kind::kEAse:
      return "e_ase";
  }
  return "?";
}

std::size_t ExpectedEffectDraws::level_index(double z) const {
  for (std::size_t l = 0; l < levels.size(); ++l)
    if (levels[l] == z) return l;
  throw EstimandError("no expected-effect draws for treatment level " + std::to_string(z));
}

namespace {

double masked_mean_difference(std::span<const double> a, std::span<const double> b, std::span<const char> mask) {
  if (a.size() != b.size()) throw EstimandError("potential-outcome vectors differ in length");
  if (!mask.empty() && mask.size() != a.size()) throw EstimandError("subgroup mask length mismatch");
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    if (std::isnan(a[i]) || std::isnan(b[i])) throw EstimandError("missing imputation for unit " + std::to_string(i));
    s += a[i] - b[i];
    ++count;
  }
  if (count == 0) throw EstimandError("empty unit set");
  return s / static_cast<double>(count);
}

double draws_contrast(const ExpectedEffectDraws& d, std::size_t la, std::size_t lb, bool against_zero,
                      std::span<const char> mask) {
  if (d.m == 0) throw EstimandError("expected effect needs at least one Monte Carlo replicate");
  if (!mask.empty() && mask.size() != d.n) throw EstimandError("subgroup mask length mismatch");
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < d.m; ++r) {
    for (std::size_t i = 0; i < d.n; ++i) {
      if (!mask.empty() && !mask[i]) continue;
      const double ref = against_zero ? d.zero_at(r, lb, i) : d.star_at(r, lb, i);
      s += d.star_at(r, la, i) - ref;
      ++count;
    }
  }
  if (count == 0) throw EstimandError("empty subgroup");
  return s / static_cast<double>(count);
}

}  // namespace

double a_cate(std::span<const double> y_treated, std::span<const double> y_control, std::span<const char> mask) {
  return masked_mean_difference(y_treated, y_control, mask);
}

double a_case(std::span<const double> y_prime, std::span<const double> y_star, std::span<const char> mask) {
  return masked_mean_difference(y_prime, y_star, mask);
}

double e_ate(const ExpectedEffectDraws& draws, double z, std::span<const char> mask) {
  return draws_contrast(draws, draws.level_index(z), draws.level_index(0.0), false, mask);
}

double e_ase(const ExpectedEffectDraws& draws, double z, std::span<const char> mask) {
  const auto l = draws.level_index(z);
  return draws_contrast(draws, l, l, true, mask);
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw EstimandError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SummaryRow summarize(std::span<const double> draws) {
  if (draws.size() < 2) throw EstimandError("summary needs at least 2 draws");
  std::vector<double> s(draws.begin(), draws.end());
  std::sort(s.begin(), s.end());
  // Sum in sorted order so the result does not depend on input order.
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double ss = 0.0;
  for (double v : s) ss += (v - mean) * (v - mean);
  SummaryRow row;
  row.mean = mean;
  row.sd = std::sqrt(ss / static_cast<double>(s.size() - 1));
  row.q025 = quantile_sorted(s, 0.025);
  row.median = quantile_sorted(s, 0.5);
  row.q975 = quantile_sorted(s, 0.975);
  row.length = row.q975 - row.q025;
  return row;
}

HtResult ht_e_ate(std::span<const double> y, std::span<const double> z, double p) {
  if (!(p > 0.0 && p < 1.0)) throw EstimandError("Horvitz-Thompson needs a treatment probability in (0, 1)");
  if (y.size() != z.size()) throw EstimandError("outcome and treatment lengths differ");
  if (y.empty()) throw EstimandError("Horvitz-Thompson on an empty sample");
  const double n = static_cast<double>(y.size());
  double est = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (z[i] != 0.0 && z[i] != 1.0) throw EstimandError("Horvitz-Thompson needs binary treatment");
    const double y2 = y[i] * y[i];
    if (z[i] == 1.0) {
      est += y[i] / p;
      // Unbiased for Y(1)^2 (1-p)/p, plus Y(1)^2 from the Young bound on the
      // cross term 2 Y(1) Y(0) <= Y(1)^2 + Y(0)^2.
      var += y2 * (1.0 - p) / (p * p) + y2 / p;
    } else {
      est -= y[i] / (1.0 - p);
      var += y2 * p / ((1.0 - p) * (1.0 - p)) + y2 / (1.0 - p);
    }
  }
  HtResult r;
  r.estimate = est / n;
  r.variance = var / (n * n);
  const double half = 1.96 * std::sqrt(r.variance);
  r.lower = r.estimate - half;
  r.upper = r.estimate + half;
  return r;
}

HtResult ht_e_ate(const Dataset& data, double p) { return ht_e_ate(data.y, data.z.values, p); }

}  // namespace doi
