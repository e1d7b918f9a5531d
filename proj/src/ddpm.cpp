#include "doi/ddpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "doi/distributions.hpp"

namespace doi {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_unit(double v) { return std::clamp(v, kTiny, 1.0 - std::numeric_limits<double>::epsilon()); }

// Keeps prior draws with extreme shape/scale inside a range where log-densities stay finite.
double positive(double v) {
  if (!(v > kTiny)) return kTiny;
  return std::min(v, 1e300);
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

void DdpmState::recompute_weights() {
  const std::size_t kk = k();
  weights.assign(kk, 0.0);
  double rest = 1.0;
  for (std::size_t j = 0; j + 1 < kk; ++j) {
    weights[j] = sticks[j] * rest;
    rest *= 1.0 - sticks[j];
  }
  if (kk > 0) weights[kk - 1] = rest;
}

std::vector<std::size_t> DdpmState::occupancy() const {
  std::vector<std::size_t> counts(k(), 0);
  for (auto c : labels) ++counts[c];
  return counts;
}

std::size_t DdpmState::occupied() const {
  const auto occ = occupancy();
  return static_cast<std::size_t>(std::count_if(occ.begin(), occ.end(), [](auto c) { return c > 0; }));
}

ArmLayout ArmLayout::for_treatment(const Treatment& t) {
  ArmLayout a;
  a.kind = t.kind;
  switch (t.kind) {
    case Treatment::Kind::kBinary:
      a.levels = {0.0, 1.0};
      break;
    case Treatment::Kind::kCategorical:
      for (int l = 0; l <= t.levels; ++l) a.levels.push_back(l);
      break;
    case Treatment::Kind::kContinuous:
      break;
  }
  return a;
}

bool ArmLayout::admits(double z) const {
  if (kind == Treatment::Kind::kContinuous) return std::isfinite(z);
  return std::find(levels.begin(), levels.end(), z) != levels.end();
}

std::size_t ArmLayout::arm_of(double z) const {
  if (kind == Treatment::Kind::kContinuous) {
    if (!std::isfinite(z)) throw EstimandError("non-finite treatment level");
    return 0;
  }
  const auto it = std::find(levels.begin(), levels.end(), z);
  if (it == levels.end()) throw EstimandError("treatment level " + std::to_string(z) + " outside treatment support");
  return static_cast<std::size_t>(it - levels.begin());
}

ModelContext::ModelContext(const Dataset& d, FeatureSpec s, Priors p, OutcomeFamily f)
    : data(&d), spec(std::move(s)), priors(p), family(f), arms(ArmLayout::for_treatment(d.z)) {
  priors.validate();
  d.validate(f);
  spec.check(d);
  if (spec.dim() == 0) throw DataError("feature spec is empty");
  features_obs = feature_matrix(spec, d, d.z.values);
  const std::vector<double> zeros(d.size(), 0.0);
  features_zero = feature_matrix(spec, d, zeros);
  arm_units.assign(arms.arms(), {});
  for (std::size_t i = 0; i < d.size(); ++i) arm_units[arms.arm_of(d.z.values[i])].push_back(i);
}

Eigen::VectorXd ModelContext::design_row(std::size_t i, double z) const {
  const auto d = static_cast<std::size_t>(data->x.cols());
  Eigen::VectorXd row(idx(arms.design_dim(d)));
  row.head(idx(d)) = data->x.row(idx(i)).transpose();
  if (arms.kind == Treatment::Kind::kContinuous) row(idx(d)) = z;
  return row;
}

Eigen::MatrixXd ModelContext::arm_design(std::size_t a) const {
  const auto& units = arm_units[a];
  const auto d = static_cast<std::size_t>(data->x.cols());
  Eigen::MatrixXd m(idx(units.size()), idx(arms.design_dim(d)));
  for (std::size_t r = 0; r < units.size(); ++r)
    m.row(idx(r)) = design_row(units[r], data->z.values[units[r]]).transpose();
  return m;
}

GaussianMoments ridge_posterior(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double noise_var,
                                double prior_var) {
  const auto p = design.cols();
  Eigen::MatrixXd a = design.transpose() * design;
  a.diagonal().array() += noise_var / prior_var;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw ChainError("ridge system is not positive definite");
  GaussianMoments m;
  m.mean = llt.solve(design.transpose() * response);
  m.cov = noise_var * llt.solve(Eigen::MatrixXd::Identity(p, p));
  m.cov = 0.5 * (m.cov + m.cov.transpose());
  return m;
}

GaussianMoments probit_posterior(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double prior_var) {
  return ridge_posterior(design, response, 1.0, prior_var);
}

Eigen::VectorXd draw_mvn(Rng& rng, const GaussianMoments& m) {
  const auto p = m.mean.size();
  Eigen::VectorXd z(p);
  for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
  const Eigen::LLT<Eigen::MatrixXd> llt(m.cov);
  if (llt.info() == Eigen::Success) return m.mean + llt.matrixL() * z;
  // Badly scaled covariance (e.g. an enormous prior-draw variance); fall back on
  // the eigen decomposition with clipped eigenvalues.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.cov);
  const Eigen::VectorXd sd = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return m.mean + es.eigenvectors() * sd.cwiseProduct(z);
}

DoiConditional doi_conditional(double prior_mean, double prior_var, double residual, double outcome_var) {
  if (!(prior_var > 0.0) || !(outcome_var > 0.0)) throw ChainError("DoI conditional needs positive variances");
  // Equivalent to ((lambda m + r sigma^2) / (lambda + sigma^2), lambda sigma^2 / (lambda + sigma^2))
  // written in precision form so huge variances do not overflow.
  const double var = 1.0 / (1.0 / prior_var + 1.0 / outcome_var);
  return {var * (prior_mean / prior_var + residual / outcome_var), var};
}

std::vector<double> cluster_log_probs(const DdpmState& s, const Eigen::Ref<const Eigen::VectorXd>& f, double g) {
  std::vector<double> lp(s.k());
  for (std::size_t k = 0; k < s.k(); ++k) {
    const double w = s.weights[k];
    lp[k] = w > 0.0 ? std::log(w) + log_normal_pdf(g, s.atoms[k].gamma.dot(f), s.atoms[k].sigma2) : -kInf;
  }
  return lp;
}

std::vector<std::pair<double, double>> stick_posteriors(std::span<const std::size_t> occupancy, double alpha) {
  const std::size_t kk = occupancy.size();
  std::vector<std::pair<double, double>> out;
  if (kk < 2) return out;
  std::size_t after = 0;
  for (auto c : occupancy) after += c;
  for (std::size_t k = 0; k + 1 < kk; ++k) {
    after -= occupancy[k];
    out.emplace_back(1.0 + static_cast<double>(occupancy[k]), alpha + static_cast<double>(after));
  }
  return out;
}

double alpha_log_acceptance(std::span<const double> sticks, std::span<const std::size_t> occupancy, double alpha,
                            double alpha_star, const Priors& priors, const AlphaOptions& opts) {
  auto log_target = [&](double a) {
    double t = log_gamma_pdf(a, priors.alpha_shape, priors.alpha_scale);
    if (opts.target == AlphaTarget::kStickPosterior) {
      const auto post = stick_posteriors(occupancy, a);
      for (std::size_t k = 0; k < post.size(); ++k) t += log_beta_pdf(sticks[k], post[k].first, post[k].second);
    } else {
      for (double v : sticks) t += log_beta_pdf(v, 1.0, a);
    }
    return t;
  };
  double r = log_target(alpha_star) - log_target(alpha);
  // Gamma(1, 1) proposal: log q(alpha) - log q(alpha*) = alpha* - alpha.
  if (opts.corrected_hastings) r += alpha_star - alpha;
  return r;
}

Atom prior_atom(const ModelContext& ctx, Rng& rng) {
  Atom a;
  a.gamma.resize(idx(ctx.q()));
  const double sd = std::sqrt(ctx.priors.gamma_var);
  for (std::size_t j = 0; j < ctx.q(); ++j) a.gamma(idx(j)) = sd * rng.normal();
  a.sigma2 = positive(rng.inv_gamma(ctx.priors.sigma_shape, ctx.priors.sigma_scale));
  return a;
}

DdpmState init_state(const ModelContext& ctx, Rng& rng) {
  DdpmState s;
  const std::size_t kk = ctx.priors.k_init;
  s.alpha = positive(rng.gamma(ctx.priors.alpha_shape, ctx.priors.alpha_scale));
  for (std::size_t k = 0; k + 1 < kk; ++k) s.sticks.push_back(clamp_unit(rng.beta(1.0, s.alpha)));
  for (std::size_t k = 0; k < kk; ++k) s.atoms.push_back(prior_atom(ctx, rng));
  s.recompute_weights();
  s.labels.resize(ctx.n());
  for (auto& c : s.labels) c = rng.uniform_index(kk);
  s.g_obs.assign(ctx.n(), 0.0);
  return s;
}

OutcomeModel init_outcome(const ModelContext& ctx, Rng& rng) {
  OutcomeModel om;
  om.family = ctx.family;
  const auto d = ctx.arms.design_dim(static_cast<std::size_t>(ctx.data->x.cols()));
  const double sd = std::sqrt(ctx.priors.beta_var);
  for (std::size_t a = 0; a < ctx.arms.arms(); ++a) {
    Eigen::VectorXd b(idx(d));
    for (std::size_t j = 0; j < d; ++j) b(idx(j)) = sd * rng.normal();
    om.beta.push_back(std::move(b));
    if (ctx.family == OutcomeFamily::kGaussian)
      om.lambda.push_back(positive(rng.inv_gamma(ctx.priors.lambda_shape, ctx.priors.lambda_scale)));
  }
  if (ctx.family == OutcomeFamily::kProbit) {
    om.aux.resize(ctx.n());
    for (std::size_t i = 0; i < ctx.n(); ++i) {
      const double z = ctx.data->z.values[i];
      const double mu = ctx.design_row(i, z).dot(om.beta[ctx.arms.arm_of(z)]);
      om.aux[i] = ctx.data->y[i] == 1.0 ? sample_truncated_normal(rng, mu, 1.0, 0.0, kInf)
                                        : sample_truncated_normal(rng, mu, 1.0, -kInf, 0.0);
    }
  }
  return om;
}

void step_draw_doi(DdpmState& s, const OutcomeModel& om, const ModelContext& ctx, Rng& rng) {
  const auto& data = *ctx.data;
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    const Atom& atom = s.atoms[s.labels[i]];
    const double z = data.z.values[i];
    const std::size_t a = ctx.arms.arm_of(z);
    const double fit = ctx.design_row(i, z).dot(om.beta[a]);
    double residual = 0.0;
    double outcome_var = 1.0;
    if (om.family == OutcomeFamily::kGaussian) {
      residual = data.y[i] - fit;
      outcome_var = om.lambda[a];
    } else {
      residual = om.aux[i] - fit;
    }
    const double prior_mean = atom.gamma.dot(ctx.features_obs.row(idx(i)).transpose());
    const auto c = doi_conditional(prior_mean, atom.sigma2, residual, outcome_var);
    s.g_obs[i] = c.mean + std::sqrt(c.var) * rng.normal();
  }
}

void step_draw_clusters(DdpmState& s, const ModelContext& ctx, Rng& rng) {
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    const auto lp = cluster_log_probs(s, ctx.features_obs.row(idx(i)).transpose(), s.g_obs[i]);
    s.labels[i] = rng.categorical_log(lp);
  }
}

void step_update_sticks(DdpmState& s, Rng& rng) {
  const auto post = stick_posteriors(s.occupancy(), s.alpha);
  for (std::size_t k = 0; k < post.size(); ++k) s.sticks[k] = clamp_unit(rng.beta(post[k].first, post[k].second));
  s.recompute_weights();
}

AlphaStep step_mh_alpha(DdpmState& s, const Priors& priors, const AlphaOptions& opts, Rng& rng) {
  const double proposal = positive(rng.gamma(1.0, 1.0));
  const double log_r = alpha_log_acceptance(s.sticks, s.occupancy(), s.alpha, proposal, priors, opts);
  const bool accept = log_r >= 0.0 || std::log(rng.uniform()) < log_r;
  if (accept) s.alpha = proposal;
  return {s.alpha, accept, log_r};
}

std::pair<double, double> atom_variance_posterior(const ModelContext& ctx, const Atom& atom,
                                                  std::span<const std::size_t> members, std::span<const double> g) {
  double ss = 0.0;
  for (auto i : members) {
    const double r = g[i] - atom.gamma.dot(ctx.features_obs.row(idx(i)).transpose());
    ss += r * r;
  }
  return {ctx.priors.sigma_shape + 0.5 * static_cast<double>(members.size()), ctx.priors.sigma_scale + 0.5 * ss};
}

void step_update_atoms(DdpmState& s, const ModelContext& ctx, Rng& rng) {
  std::vector<std::vector<std::size_t>> members(s.k());
  for (std::size_t i = 0; i < ctx.n(); ++i) members[s.labels[i]].push_back(i);
  for (std::size_t k = 0; k < s.k(); ++k) {
    const auto& mk = members[k];
    if (mk.empty()) {
      s.atoms[k] = prior_atom(ctx, rng);
      continue;
    }
    Atom& atom = s.atoms[k];
    const auto [shape, scale] = atom_variance_posterior(ctx, atom, mk, s.g_obs);
    atom.sigma2 = positive(rng.inv_gamma(shape, scale));
    Eigen::MatrixXd m(idx(mk.size()), idx(ctx.q()));
    Eigen::VectorXd g(idx(mk.size()));
    for (std::size_t r = 0; r < mk.size(); ++r) {
      m.row(idx(r)) = ctx.features_obs.row(idx(mk[r]));
      g(idx(r)) = s.g_obs[mk[r]];
    }
    atom.gamma = draw_mvn(rng, ridge_posterior(m, g, atom.sigma2, ctx.priors.gamma_var));
  }
}

std::pair<double, double> outcome_variance_posterior(const ModelContext& ctx, std::size_t a,
                                                     const Eigen::VectorXd& beta, std::span<const double> g) {
  double ss = 0.0;
  for (auto i : ctx.arm_units[a]) {
    const double r = ctx.data->y[i] - ctx.design_row(i, ctx.data->z.values[i]).dot(beta) - g[i];
    ss += r * r;
  }
  return {ctx.priors.lambda_shape + 0.5 * static_cast<double>(ctx.arm_units[a].size()),
          ctx.priors.lambda_scale + 0.5 * ss};
}

void step_update_outcome_gaussian(OutcomeModel& om, const DdpmState& s, const ModelContext& ctx, Rng& rng) {
  for (std::size_t a = 0; a < ctx.arms.arms(); ++a) {
    const auto& units = ctx.arm_units[a];
    const auto [shape, scale] = outcome_variance_posterior(ctx, a, om.beta[a], s.g_obs);
    om.lambda[a] = positive(rng.inv_gamma(shape, scale));
    const Eigen::MatrixXd x = ctx.arm_design(a);
    Eigen::VectorXd r(idx(units.size()));
    for (std::size_t t = 0; t < units.size(); ++t) r(idx(t)) = ctx.data->y[units[t]] - s.g_obs[units[t]];
    om.beta[a] = draw_mvn(rng, ridge_posterior(x, r, om.lambda[a], ctx.priors.beta_var));
  }
}

void step_probit_augmentation(OutcomeModel& om, const DdpmState& s, const ModelContext& ctx, bool subtract_doi,
                              Rng& rng) {
  const auto& data = *ctx.data;
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    const double z = data.z.values[i];
    const double mu = ctx.design_row(i, z).dot(om.beta[ctx.arms.arm_of(z)]) + s.g_obs[i];
    if (data.y[i] == 1.0) {
      om.aux[i] = sample_truncated_normal(rng, mu, 1.0, 0.0, kInf);
    } else if (data.y[i] == 0.0) {
      om.aux[i] = sample_truncated_normal(rng, mu, 1.0, -kInf, 0.0);
    } else {
      throw ChainError("probit outcome at unit " + std::to_string(i) + " is not 0/1");
    }
  }
  for (std::size_t a = 0; a < ctx.arms.arms(); ++a) {
    const auto& units = ctx.arm_units[a];
    const Eigen::MatrixXd x = ctx.arm_design(a);
    Eigen::VectorXd r(idx(units.size()));
    for (std::size_t t = 0; t < units.size(); ++t)
      r(idx(t)) = om.aux[units[t]] - (subtract_doi ? s.g_obs[units[t]] : 0.0);
    om.beta[a] = draw_mvn(rng, probit_posterior(x, r, ctx.priors.beta_var));
  }
}

void grow_truncation(DdpmState& s, std::size_t new_k, const ModelContext& ctx, Rng& rng) {
  if (new_k <= s.k()) return;
  while (s.sticks.size() + 1 < new_k) s.sticks.push_back(clamp_unit(rng.beta(1.0, s.alpha)));
  while (s.atoms.size() < new_k) s.atoms.push_back(prior_atom(ctx, rng));
  s.recompute_weights();
}

double draw_outcome(const OutcomeModel& om, const ModelContext& ctx, std::size_t i, double z, double g, Rng& rng,
                    const ImputeOptions& opts) {
  const std::size_t a = ctx.arms.arm_of(z);
  const double mu = ctx.design_row(i, z).dot(om.beta[a]) + g;
  if (om.family == OutcomeFamily::kGaussian) {
    if (opts.mean_only) return mu;
    return mu + std::sqrt(om.lambda[a]) * rng.normal();
  }
  const double p = normal_cdf(mu);
  if (opts.mean_only) return p;
  return rng.uniform() < p ? 1.0 : 0.0;
}

double outcome_given_noise(const OutcomeModel& om, const ModelContext& ctx, std::size_t i, double z, double g, double e,
                           const ImputeOptions& opts) {
  const std::size_t a = ctx.arms.arm_of(z);
  const double mu = ctx.design_row(i, z).dot(om.beta[a]) + g;
  if (om.family == OutcomeFamily::kGaussian) return opts.mean_only ? mu : mu + std::sqrt(om.lambda[a]) * e;
  if (opts.mean_only) return normal_cdf(mu);
  return mu + e > 0.0 ? 1.0 : 0.0;
}

namespace {

// Positions where `zprime` departs from the realized assignment.
std::vector<std::size_t> departures(const ModelContext& ctx, std::span<const double> zprime) {
  if (zprime.size() != ctx.n()) throw EstimandError("assignment vector length does not match the data");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ctx.n(); ++i)
    if (zprime[i] != ctx.data->z.values[i]) out.push_back(i);
  return out;
}

// zprime_{-i} equals the realized Z_{-i}.
bool realized_for(std::span<const std::size_t> dep, std::size_t i) {
  return dep.empty() || (dep.size() == 1 && dep[0] == i);
}

}  // namespace

std::vector<double> impute_doi(const DdpmState& s, const ModelContext& ctx, std::span<const double> zprime, Rng& rng) {
  const auto dep = departures(ctx, zprime);
  for (double v : zprime)
    if (!ctx.data->z.admits(v)) throw EstimandError("assignment value outside treatment support");
  std::vector<double> g(ctx.n());
  Eigen::MatrixXd f;
  if (!dep.empty()) f = feature_matrix(ctx.spec, *ctx.data, zprime);
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    if (realized_for(dep, i)) {
      g[i] = s.g_obs[i];
      continue;
    }
    const Atom& atom = s.atoms[rng.categorical(s.weights)];
    g[i] = atom.gamma.dot(f.row(idx(i)).transpose()) + std::sqrt(atom.sigma2) * rng.normal();
  }
  return g;
}

std::vector<double> impute_counterfactuals(const DdpmState& s, const OutcomeModel& om, const ModelContext& ctx,
                                           double z, std::span<const double> zprime, std::span<const double> g,
                                           Rng& rng, const ImputeOptions& opts) {
  (void)s;
  if (!ctx.arms.admits(z)) throw EstimandError("query level " + std::to_string(z) + " outside treatment support");
  if (g.size() != ctx.n()) throw EstimandError("DoI vector length does not match the data");
  const auto dep = departures(ctx, zprime);
  std::vector<double> y(ctx.n());
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    if (realized_for(dep, i) && ctx.data->z.values[i] == z) {
      y[i] = ctx.data->y[i];
    } else {
      y[i] = draw_outcome(om, ctx, i, z, g[i], rng, opts);
    }
  }
  return y;
}

ExpectedEffectDraws draw_expected_effect_samples(const DdpmState& s, const OutcomeModel& om, const ModelContext& ctx,
                                                 const AssignmentMechanism& mech, std::span<const double> levels,
                                                 std::size_t m, Rng& rng, const ImputeOptions& opts) {
  if (m < 1) throw EstimandError("expected-effect Monte Carlo needs m >= 1");
  if (std::find(levels.begin(), levels.end(), 0.0) == levels.end())
    throw EstimandError("expected-effect levels must include control (0)");
  for (double z : levels)
    if (!ctx.arms.admits(z)) throw EstimandError("query level " + std::to_string(z) + " outside treatment support");
  const auto& data = *ctx.data;
  const std::span<const std::int64_t> strata =
      data.strata ? std::span<const std::int64_t>(*data.strata) : std::span<const std::int64_t>();
  ExpectedEffectDraws out(std::vector<double>(levels.begin(), levels.end()), ctx.n(), m);
  for (std::size_t rep = 0; rep < m; ++rep) {
    const auto zstar = mech.sample(ctx.n(), strata, rng);
    const Eigen::MatrixXd f = feature_matrix(ctx.spec, data, zstar);
    for (std::size_t i = 0; i < ctx.n(); ++i) {
      const Atom& atom = s.atoms[rng.categorical(s.weights)];
      const double sd = std::sqrt(atom.sigma2);
      const double e_star = rng.normal();
      const double e_zero = opts.shared_noise ? e_star : rng.normal();
      const double g_star = atom.gamma.dot(f.row(idx(i)).transpose()) + sd * e_star;
      const double g_zero = atom.gamma.dot(ctx.features_zero.row(idx(i)).transpose()) + sd * e_zero;
      for (std::size_t l = 0; l < levels.size(); ++l) {
        if (opts.shared_noise) {
          const double e = rng.normal();
          out.star_at(rep, l, i) = outcome_given_noise(om, ctx, i, levels[l], g_star, e, opts);
          out.zero_at(rep, l, i) = outcome_given_noise(om, ctx, i, levels[l], g_zero, e, opts);
        } else {
          out.star_at(rep, l, i) = draw_outcome(om, ctx, i, levels[l], g_star, rng, opts);
          out.zero_at(rep, l, i) = draw_outcome(om, ctx, i, levels[l], g_zero, rng, opts);
        }
      }
    }
  }
  return out;
}

}  // namespace doi
