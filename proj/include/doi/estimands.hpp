#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "doi/core.hpp"

namespace doi {

class EstimandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Units selected by neighbourhood size and/or treated-neighbour fraction under
/// the realized assignment (rows such as "2 siblings" or "50% of siblings treated").
struct Subgroup {
  std::optional<std::size_t> neighbors;
  std::optional<double> treated_fraction;
  double fraction_tol = 0.01;

  /// Membership mask over units of `data`, evaluated at the realized treatment.
  std::vector<char> mask(const Dataset& data) const;
};

struct EstimandQuery {
  enum class Kind { kACate, kACase, kEAte, kEAse };

  std::string name;
  Kind kind = Kind::kEAte;
  double level = 1.0;                       ///< own-treatment level z
  std::vector<double> zprime;               ///< A-CATE / A-CASE comparison assignment
  std::vector<double> zstar;                ///< A-CASE reference assignment
  std::optional<AssignmentMechanism> mech;  ///< expected effects
  std::optional<Subgroup> subgroup;

  static std::string kind_name(Kind k);
};

/// Per-unit potential-outcome draws from the expected-effect Monte Carlo:
/// for every replicate m, level index l and unit i, `star` holds Y_i(level_l, Z*_{-i})
/// and `zero` holds Y_i(level_l, 0_{-i}).
struct ExpectedEffectDraws {
  std::vector<double> levels;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> star;
  std::vector<double> zero;

  ExpectedEffectDraws() = default;
  ExpectedEffectDraws(std::vector<double> lv, std::size_t units, std::size_t reps)
      : levels(std::move(lv)), n(units), m(reps), star(levels.size() * n * m), zero(levels.size() * n * m) {}

  std::size_t level_index(double z) const;
  double& star_at(std::size_t rep, std::size_t l, std::size_t i) { return star[(rep * levels.size() + l) * n + i]; }
  double& zero_at(std::size_t rep, std::size_t l, std::size_t i) { return zero[(rep * levels.size() + l) * n + i]; }
  double star_at(std::size_t rep, std::size_t l, std::size_t i) const { return star[(rep * levels.size() + l) * n + i]; }
  double zero_at(std::size_t rep, std::size_t l, std::size_t i) const { return zero[(rep * levels.size() + l) * n + i]; }
};

/// Mean over units of y_a - y_b, restricted to `mask` when given.
double a_cate(std::span<const double> y_treated, std::span<const double> y_control, std::span<const char> mask = {});
double a_case(std::span<const double> y_prime, std::span<const double> y_star, std::span<const char> mask = {});

/// Average over units and replicates of Y_i(z, Z*) - Y_i(0, Z*).
double e_ate(const ExpectedEffectDraws& draws, double z, std::span<const char> mask = {});
/// Average over units and replicates of Y_i(z, Z*) - Y_i(z, 0).
double e_ase(const ExpectedEffectDraws& draws, double z, std::span<const char> mask = {});

struct SummaryRow {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double median = 0.0;
  double q975 = 0.0;
  double length = 0.0;
};

/// Type-7 (linear interpolation) empirical quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double prob);
SummaryRow summarize(std::span<const double> draws);

struct HtResult {
  double estimate = 0.0;
  double variance = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Horvitz-Thompson estimate of the expected average treatment effect under
/// i.i.d. Bernoulli(p) assignment, with a conservative variance bound.
HtResult ht_e_ate(std::span<const double> y, std::span<const double> z, double p);
HtResult ht_e_ate(const Dataset& data, double p);

}  // namespace doi
