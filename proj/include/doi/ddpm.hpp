#pragma once

// Blocked Gibbs sampler for the degree-of-interference model: a truncated
// stick-breaking mixture of Normal atoms whose locations are linear in the
// interference features, paired with a Gaussian or probit outcome model.

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <vector>

#include "doi/core.hpp"
#include "doi/estimands.hpp"
#include "doi/rng.hpp"

namespace doi {

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Atom {
  Eigen::VectorXd gamma;
  double sigma2 = 1.0;
};

struct DdpmState {
  /// Free stick fractions v'_1..v'_{K-1}; v'_K = 1 is implicit.
  std::vector<double> sticks;
  std::vector<double> weights;
  std::vector<Atom> atoms;
  double alpha = 1.0;
  std::vector<std::size_t> labels;  ///< 0-based cluster index per unit
  std::vector<double> g_obs;        ///< DoI at the realized assignment

  std::size_t k() const { return atoms.size(); }
  /// w_k = v'_k prod_{l<k} (1 - v'_l), with v'_K = 1.
  void recompute_weights();
  std::vector<std::size_t> occupancy() const;
  std::size_t occupied() const;
};

/// Which treatment arm's coefficients serve a given level, and how the design
/// row is built. Binary/categorical treatments get one arm per level; a
/// continuous treatment shares one arm with the level appended as a regressor.
struct ArmLayout {
  Treatment::Kind kind = Treatment::Kind::kBinary;
  std::vector<double> levels;

  static ArmLayout for_treatment(const Treatment& t);
  std::size_t arms() const { return kind == Treatment::Kind::kContinuous ? 1 : levels.size(); }
  /// Throws EstimandError when `z` has no arm.
  std::size_t arm_of(double z) const;
  bool admits(double z) const;
  std::size_t design_dim(std::size_t covariates) const {
    return covariates + (kind == Treatment::Kind::kContinuous ? 1 : 0);
  }
};

struct OutcomeModel {
  OutcomeFamily family = OutcomeFamily::kGaussian;
  std::vector<Eigen::VectorXd> beta;  ///< one per arm
  std::vector<double> lambda;         ///< one per arm, Gaussian only
  std::vector<double> aux;            ///< probit latent utilities, one per unit
};

/// Everything fixed for the lifetime of a chain.
struct ModelContext {
  const Dataset* data = nullptr;
  FeatureSpec spec;
  Priors priors;
  OutcomeFamily family = OutcomeFamily::kGaussian;
  ArmLayout arms;
  Eigen::MatrixXd features_obs;   ///< f_i at the realized assignment
  Eigen::MatrixXd features_zero;  ///< f_i at the all-control assignment
  std::vector<std::vector<std::size_t>> arm_units;

  ModelContext(const Dataset& d, FeatureSpec s, Priors p, OutcomeFamily f);

  std::size_t n() const { return data->size(); }
  std::size_t q() const { return spec.dim(); }
  /// Outcome-model design row for unit i at own treatment z.
  Eigen::VectorXd design_row(std::size_t i, double z) const;
  /// Design matrix of the units in arm `a` at their realized treatment.
  Eigen::MatrixXd arm_design(std::size_t a) const;
};

struct GaussianMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Ridge-form Normal posterior used by the atom and outcome updates:
/// mean = (D'D + (noise/prior_var) I)^{-1} D' r, cov = noise (D'D + (noise/prior_var) I)^{-1}.
GaussianMoments ridge_posterior(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double noise_var,
                                double prior_var);

/// Probit coefficient posterior with prior N(0, prior_var I) and unit noise.
GaussianMoments probit_posterior(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double prior_var);

Eigen::VectorXd draw_mvn(Rng& rng, const GaussianMoments& m);

struct DoiConditional {
  double mean;
  double var;
};

/// Precision-weighted Normal conditional of one DoI given its atom prior
/// mean/variance and the outcome residual with variance `outcome_var`.
DoiConditional doi_conditional(double prior_mean, double prior_var, double residual, double outcome_var);

/// Log unnormalised label probabilities log w_k + log N(g | gamma_k . f, sigma_k^2).
std::vector<double> cluster_log_probs(const DdpmState& s, const Eigen::Ref<const Eigen::VectorXd>& f, double g);

/// Beta parameters (1 + n_k, alpha + m_k) for each free stick.
std::vector<std::pair<double, double>> stick_posteriors(std::span<const std::size_t> occupancy, double alpha);

enum class AlphaTarget {
  /// Product of the stick posterior densities f(v'_k | 1 + n_k, alpha + m_k), as printed.
  kStickPosterior,
  /// Full conditional p(alpha) prod_k Beta(v'_k | 1, alpha).
  kStickPrior,
};

struct AlphaOptions {
  AlphaTarget target = AlphaTarget::kStickPosterior;
  /// Divide by the Gamma(1, 1) proposal ratio (an independence-sampler Hastings term).
  bool corrected_hastings = false;
};

/// log r for moving alpha -> alpha_star (before the min with 0).
double alpha_log_acceptance(std::span<const double> sticks, std::span<const std::size_t> occupancy, double alpha,
                            double alpha_star, const Priors& priors, const AlphaOptions& opts);

struct AlphaStep {
  double alpha;
  bool accepted;
  double log_ratio;
};

/// Draw initial state from the priors: sticks, atoms, alpha, uniform labels, G^o = 0.
DdpmState init_state(const ModelContext& ctx, Rng& rng);
OutcomeModel init_outcome(const ModelContext& ctx, Rng& rng);
/// Atom drawn from the base measure.
Atom prior_atom(const ModelContext& ctx, Rng& rng);

// Gibbs steps, in sweep order.
void step_draw_doi(DdpmState& s, const OutcomeModel& om, const ModelContext& ctx, Rng& rng);
void step_draw_clusters(DdpmState& s, const ModelContext& ctx, Rng& rng);
void step_update_sticks(DdpmState& s, Rng& rng);
AlphaStep step_mh_alpha(DdpmState& s, const Priors& priors, const AlphaOptions& opts, Rng& rng);
void step_update_atoms(DdpmState& s, const ModelContext& ctx, Rng& rng);
void step_update_outcome_gaussian(OutcomeModel& om, const DdpmState& s, const ModelContext& ctx, Rng& rng);
/// Redraws the latent utilities and then the arm coefficients. With
/// `subtract_doi` the coefficient regression targets v - G^o.
void step_probit_augmentation(OutcomeModel& om, const DdpmState& s, const ModelContext& ctx, bool subtract_doi,
                              Rng& rng);

/// Atom-variance conditional parameters (shape, scale) for cluster members.
std::pair<double, double> atom_variance_posterior(const ModelContext& ctx, const Atom& atom,
                                                  std::span<const std::size_t> members, std::span<const double> g);

/// Outcome-variance conditional parameters (shape, scale) for arm `a`.
std::pair<double, double> outcome_variance_posterior(const ModelContext& ctx, std::size_t a,
                                                     const Eigen::VectorXd& beta, std::span<const double> g);

/// Grows the truncation to `new_k`, filling sticks and atoms from the priors.
void grow_truncation(DdpmState& s, std::size_t new_k, const ModelContext& ctx, Rng& rng);

struct ImputeOptions {
  /// Use the outcome-model mean instead of a random draw.
  bool mean_only = false;
  /// Expected effects: G* and G^0 share one standard-normal draw, and the
  /// outcomes at (z, Z*) and (z, 0) share one noise draw. Each draw keeps its
  /// marginal law; only the coupling between them changes.
  bool shared_noise = true;
};

/// One outcome from the Y-model at own treatment z and DoI g.
/// Same law as draw_outcome with the standard-normal noise `e` supplied; for
/// probit the outcome is 1{mu + e > 0}.
double outcome_given_noise(const OutcomeModel& om, const ModelContext& ctx, std::size_t i, double z, double g, double e,
                           const ImputeOptions& opts = {});
double draw_outcome(const OutcomeModel& om, const ModelContext& ctx, std::size_t i, double z, double g, Rng& rng,
                    const ImputeOptions& opts = {});

/// DoI for every unit under the assignment `zprime`: the realized G^o where
/// zprime_{-i} equals the realized Z_{-i}, otherwise a fresh draw from the mixture.
std::vector<double> impute_doi(const DdpmState& s, const ModelContext& ctx, std::span<const double> zprime, Rng& rng);

/// Y_i(z, zprime_{-i}) for every unit, reusing observed outcomes where they are
/// the requested potential outcome.
std::vector<double> impute_counterfactuals(const DdpmState& s, const OutcomeModel& om, const ModelContext& ctx,
                                           double z, std::span<const double> zprime, std::span<const double> g,
                                           Rng& rng, const ImputeOptions& opts = {});

/// Monte Carlo draws of Y_i(z, Z*_{-i}) and Y_i(z, 0_{-i}) with Z* from `mech`,
/// for every level in `levels` (which must include 0).
ExpectedEffectDraws draw_expected_effect_samples(const DdpmState& s, const OutcomeModel& om, const ModelContext& ctx,
                                                 const AssignmentMechanism& mech, std::span<const double> levels,
                                                 std::size_t m, Rng& rng, const ImputeOptions& opts = {});

}  // namespace doi
