#include "doi/core.hpp"

#include <cmath>

namespace doi {

Treatment Treatment::binary(std::vector<double> v) {
  Treatment t{Kind::kBinary, 1, std::move(v)};
  t.validate();
  return t;
}

Treatment Treatment::categorical(int levels, std::vector<double> v) {
  Treatment t{Kind::kCategorical, levels, std::move(v)};
  t.validate();
  return t;
}

Treatment Treatment::continuous(std::vector<double> v) {
  Treatment t{Kind::kContinuous, 0, std::move(v)};
  t.validate();
  return t;
}

bool Treatment::admits(double z) const {
  switch (kind) {
    case Kind::kBinary:
      return z == 0.0 || z == 1.0;
    case Kind::kCategorical:
      return z >= 0.0 && z <= levels && z == std::floor(z);
    case Kind::kContinuous:
      return std::isfinite(z);
  }
  return false;
}

void Treatment::validate() const {
  if (kind == Kind::kCategorical && levels < 1) throw DataError("categorical treatment needs at least one level");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!admits(values[i]))
      throw DataError("treatment value " + std::to_string(values[i]) + " at unit " + std::to_string(i) +
                      " outside support");
}

void Dataset::validate(OutcomeFamily family) const {
  const std::size_t n = net.size();
  auto check_len = [&](std::size_t len, const char* what) {
    if (len != n)
      throw DataError(std::string(what) + " has length " + std::to_string(len) + ", network has " + std::to_string(n) +
                      " units");
  };
  check_len(static_cast<std::size_t>(x.rows()), "covariates");
  check_len(z.size(), "treatment");
  check_len(y.size(), "outcome");
  if (scores) check_len(scores->size(), "scores");
  if (strata) check_len(strata->size(), "strata");
  z.validate();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) throw DataError("non-finite outcome at unit " + std::to_string(i));
    if (family == OutcomeFamily::kProbit && y[i] != 0.0 && y[i] != 1.0)
      throw DataError("probit outcome at unit " + std::to_string(i) + " is not 0/1");
  }
  if (!x.allFinite()) throw DataError("non-finite covariate");
}

AssignmentMechanism AssignmentMechanism::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("bernoulli probability must lie in [0, 1]");
  AssignmentMechanism m;
  m.kind_ = Kind::kBernoulli;
  m.p_ = p;
  return m;
}

AssignmentMechanism AssignmentMechanism::stratified(std::map<std::int64_t, double> probs) {
  if (probs.empty()) throw DataError("stratified mechanism needs at least one stratum");
  for (const auto& [s, p] : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw DataError("stratum " + std::to_string(s) + " probability must lie in [0, 1]");
  AssignmentMechanism m;
  m.kind_ = Kind::kStratifiedBernoulli;
  m.strata_p_ = std::move(probs);
  return m;
}

double AssignmentMechanism::probability_for(std::optional<std::int64_t> stratum) const {
  if (kind_ == Kind::kBernoulli) return p_;
  if (!stratum) throw DataError("stratified mechanism requires stratum labels");
  const auto it = strata_p_.find(*stratum);
  if (it == strata_p_.end()) throw DataError("no treatment probability for stratum " + std::to_string(*stratum));
  return it->second;
}

std::vector<double> AssignmentMechanism::sample(std::size_t n, std::span<const std::int64_t> strata, Rng& rng) const {
  if (kind_ == Kind::kStratifiedBernoulli && strata.size() != n)
    throw DataError("stratified mechanism requires stratum labels for every unit");
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = kind_ == Kind::kBernoulli ? p_ : probability_for(strata[i]);
    z[i] = rng.uniform() < p ? 1.0 : 0.0;
  }
  return z;
}

std::vector<double> AssignmentMechanism::sample(std::size_t n, std::span<const std::int64_t> strata,
                                                std::uint64_t seed) const {
  Rng rng(seed);
  return sample(n, strata, rng);
}

double AssignmentMechanism::density(std::span<const double> z, std::span<const std::int64_t> strata) const {
  if (kind_ == Kind::kStratifiedBernoulli && strata.size() != z.size())
    throw DataError("stratified mechanism requires stratum labels for every unit");
  double mass = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p = kind_ == Kind::kBernoulli ? p_ : probability_for(strata[i]);
    if (z[i] == 1.0) {
      mass *= p;
    } else if (z[i] == 0.0) {
      mass *= 1.0 - p;
    } else {
      return 0.0;
    }
  }
  return mass;
}

std::string FeatureTerm::name(Kind k) {
  switch (k) {
    case Kind::kIntercept:
      return "intercept";
    case Kind::kWeightedTreatedSum:
      return "weighted_treated_sum";
    case Kind::kScoredTreatedSum:
      return "scored_treated_sum";
    case Kind::kNormalizedTreatedSum:
      return "normalized_treated_sum";
    case Kind::kTreatedFraction:
      return "treated_fraction";
    case Kind::kCovariateGap:
      return "covariate_gap";
  }
  return "?";
}

FeatureTerm::Kind FeatureTerm::parse(const std::string& name) {
  for (auto k : {Kind::kIntercept, Kind::kWeightedTreatedSum, Kind::kScoredTreatedSum, Kind::kNormalizedTreatedSum,
                 Kind::kTreatedFraction, Kind::kCovariateGap})
    if (FeatureTerm::name(k) == name) return k;
  throw DataError("unknown feature term '" + name + "'");
}

void FeatureSpec::check(const Dataset& data) const {
  for (const auto& t : terms) {
    if (t.kind == FeatureTerm::Kind::kScoredTreatedSum && !data.scores)
      throw DataError("scored_treated_sum needs unit scores");
    if (t.kind == FeatureTerm::Kind::kCovariateGap && t.column >= static_cast<std::size_t>(data.x.cols()))
      throw DataError("covariate_gap column " + std::to_string(t.column) + " out of range");
  }
}

namespace {

double eval_term(const FeatureTerm& t, const Dataset& data, std::span<const double> z, std::size_t i) {
  const auto nb = data.net.neighbors(i);
  const auto wt = data.net.weights(i);
  const double deg = static_cast<double>(nb.size());
  double s = 0.0;
  switch (t.kind) {
    case FeatureTerm::Kind::kIntercept:
      return 1.0;
    case FeatureTerm::Kind::kWeightedTreatedSum:
      for (std::size_t k = 0; k < nb.size(); ++k) s += z[nb[k]] * wt[k];
      return s;
    case FeatureTerm::Kind::kScoredTreatedSum: {
      if (!data.scores) throw DataError("scored_treated_sum needs unit scores");
      const auto& p = *data.scores;
      for (std::size_t k = 0; k < nb.size(); ++k) s += z[nb[k]] * p[nb[k]] * wt[k];
      return s;
    }
    case FeatureTerm::Kind::kNormalizedTreatedSum:
      for (std::size_t k = 0; k < nb.size(); ++k) s += z[nb[k]] * wt[k];
      return s / (deg + 1.0);
    case FeatureTerm::Kind::kTreatedFraction:
      if (nb.empty()) return 0.0;
      for (std::size_t k = 0; k < nb.size(); ++k) s += z[nb[k]] * wt[k];
      return s / deg;
    case FeatureTerm::Kind::kCovariateGap: {
      if (t.column >= static_cast<std::size_t>(data.x.cols())) throw DataError("covariate_gap column out of range");
      const auto c = static_cast<Eigen::Index>(t.column);
      const double own = data.x(static_cast<Eigen::Index>(i), c);
      if (nb.empty()) return own;
      for (std::size_t k = 0; k < nb.size(); ++k) s += data.x(static_cast<Eigen::Index>(nb[k]), c) * z[nb[k]] * wt[k];
      return own - s / deg;
    }
  }
  return 0.0;
}

}  // namespace

Eigen::VectorXd eval_features(const FeatureSpec& spec, const Dataset& data, std::span<const double> z, std::size_t i) {
  if (z.size() != data.net.size()) throw DataError("assignment length does not match the network");
  if (i >= data.net.size()) throw DataError("unit index out of range");
  Eigen::VectorXd f(static_cast<Eigen::Index>(spec.dim()));
  for (std::size_t t = 0; t < spec.dim(); ++t) f(static_cast<Eigen::Index>(t)) = eval_term(spec.terms[t], data, z, i);
  return f;
}

Eigen::MatrixXd feature_matrix(const FeatureSpec& spec, const Dataset& data, std::span<const double> z) {
  if (z.size() != data.net.size()) throw DataError("assignment length does not match the network");
  const std::size_t n = data.net.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.dim()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < spec.dim(); ++t)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = eval_term(spec.terms[t], data, z, i);
  return m;
}

void Priors::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DataError(std::string("priors.") + field + " must be positive and finite");
  };
  positive(beta_var, "beta_var");
  positive(lambda_shape, "lambda_shape");
  positive(lambda_scale, "lambda_scale");
  positive(gamma_var, "gamma_var");
  positive(sigma_shape, "sigma_shape");
  positive(sigma_scale, "sigma_scale");
  positive(alpha_shape, "alpha_shape");
  positive(alpha_scale, "alpha_scale");
  if (k_init < 2) throw DataError("priors.k_init must be >= 2");
}

}  // namespace doi
