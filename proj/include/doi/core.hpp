#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "doi/network.hpp"
#include "doi/rng.hpp"

namespace doi {

/// Raised when a dataset, mechanism, or feature specification violates its contract.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutcomeFamily { kGaussian, kProbit };

struct Treatment {
  enum class Kind { kBinary, kCategorical, kContinuous };

  Kind kind = Kind::kBinary;
  /// Number of non-control levels for categorical treatments (values 0..levels).
  int levels = 1;
  std::vector<double> values;

  static Treatment binary(std::vector<double> v);
  static Treatment categorical(int levels, std::vector<double> v);
  static Treatment continuous(std::vector<double> v);

  std::size_t size() const { return values.size(); }
  /// Throws DataError unless every value lies in the support of `kind`.
  void validate() const;
  /// Whether `z` is an admissible level for this treatment kind.
  bool admits(double z) const;
};

struct Dataset {
  Eigen::MatrixXd x;  ///< N x d covariates
  Treatment z;
  std::vector<double> y;
  Network net;
  std::optional<std::vector<double>> scores;
  std::optional<std::vector<std::int64_t>> strata;

  std::size_t size() const { return y.size(); }
  /// Checks lengths against net.size() and, for probit, that outcomes are 0/1.
  void validate(OutcomeFamily family) const;
};

class AssignmentMechanism {
 public:
  enum class Kind { kBernoulli, kStratifiedBernoulli };

  static AssignmentMechanism bernoulli(double p);
  static AssignmentMechanism stratified(std::map<std::int64_t, double> probs);

  Kind kind() const { return kind_; }
  double probability() const { return p_; }
  const std::map<std::int64_t, double>& stratum_probabilities() const { return strata_p_; }

  /// Treatment probability for a unit in `stratum` (ignored for plain Bernoulli).
  double probability_for(std::optional<std::int64_t> stratum) const;

  /// Independent per-unit draws. Stratified mechanisms need `strata` covering every unit.
  std::vector<double> sample(std::size_t n, std::span<const std::int64_t> strata, Rng& rng) const;
  std::vector<double> sample(std::size_t n, std::span<const std::int64_t> strata, std::uint64_t seed) const;

  /// Probability mass of a binary assignment vector.
  double density(std::span<const double> z, std::span<const std::int64_t> strata = {}) const;

 private:
  Kind kind_ = Kind::kBernoulli;
  double p_ = 0.5;
  std::map<std::int64_t, double> strata_p_;
};

struct FeatureTerm {
  enum class Kind {
    kIntercept,
    kWeightedTreatedSum,    ///< sum_j z_j A_ij
    kScoredTreatedSum,      ///< sum_j z_j P_j A_ij
    kNormalizedTreatedSum,  ///< sum_j z_j A_ij / (|N_i| + 1)
    kTreatedFraction,       ///< sum_j z_j A_ij / |N_i|, 0 when isolated
    kCovariateGap,          ///< x_ic - sum_j x_jc z_j A_ij / |N_i|
  };
  Kind kind;
  std::size_t column = 0;  ///< covariate column, kCovariateGap only

  static std::string name(Kind k);
  static Kind parse(const std::string& name);
  friend bool operator==(const FeatureTerm&, const FeatureTerm&) = default;
};

/// Ordered list of terms defining the location of a mixture atom, mu_i = gamma . f_i.
struct FeatureSpec {
  std::vector<FeatureTerm> terms;

  std::size_t dim() const { return terms.size(); }
  /// Throws DataError when a term cannot be evaluated on `data`.
  void check(const Dataset& data) const;
};

Eigen::VectorXd eval_features(const FeatureSpec& spec, const Dataset& data, std::span<const double> z, std::size_t i);
/// All units at once; row i equals eval_features(spec, data, z, i).
Eigen::MatrixXd feature_matrix(const FeatureSpec& spec, const Dataset& data, std::span<const double> z);

struct Priors {
  double beta_var = 100.0;     ///< Normal prior variance of outcome coefficients
  double lambda_shape = 0.1;   ///< Inverse-Gamma shape for outcome variance
  double lambda_scale = 0.1;
  double gamma_var = 100.0;    ///< Normal prior variance of atom coefficients
  double sigma_shape = 0.1;    ///< Inverse-Gamma shape for atom variance
  double sigma_scale = 0.1;
  double alpha_shape = 1.0;    ///< Gamma prior on the concentration
  double alpha_scale = 1.0;
  std::size_t k_init = 10;

  /// Throws DataError naming the first offending field (e.g. "priors.beta_var").
  void validate() const;
};

}  // namespace doi
