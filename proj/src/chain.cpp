#include "doi/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace doi {

void ChainConfig::validate() const {
  if (burn_in < 1) throw DataError("chain.burn_in must be >= 1");
  if (keep < 1) throw DataError("chain.keep must be >= 1");
  if (thin < 1) throw DataError("chain.thin must be >= 1");
  if (!(k_growth > 1.0)) throw DataError("chain.k_growth must be > 1");
  if (k_max < 2) throw DataError("chain.k_max must be >= 2");
  if (mc_draws < 1) throw DataError("chain.mc_draws must be >= 1");
}

const std::vector<double>& PosteriorDraws::of(const std::string& name) const {
  for (std::size_t q = 0; q < names.size(); ++q)
    if (names[q] == name) return draws[q];
  throw EstimandError("no draws for query '" + name + "'");
}

namespace {

struct PreparedQuery {
  const EstimandQuery* query;
  std::vector<char> mask;
  std::size_t mech_group = 0;
};

struct MechGroup {
  AssignmentMechanism mech;
  std::vector<double> levels;
};

bool same_mechanism(const AssignmentMechanism& a, const AssignmentMechanism& b) {
  return a.kind() == b.kind() && a.probability() == b.probability() &&
         a.stratum_probabilities() == b.stratum_probabilities();
}

void check_assignment(const ModelContext& ctx, const std::vector<double>& v, const std::string& what,
                      const std::string& name) {
  if (v.size() != ctx.n())
    throw EstimandError("query '" + name + "': " + what + " has length " + std::to_string(v.size()) + ", expected " +
                        std::to_string(ctx.n()));
  for (double x : v)
    if (!ctx.data->z.admits(x)) throw EstimandError("query '" + name + "': " + what + " value outside treatment support");
}

}  // namespace

PosteriorDraws run_chain(const Dataset& data, const ChainSetup& setup) {
  const ChainConfig& cfg = setup.cfg;
  cfg.validate();
  const ModelContext ctx(data, setup.spec, setup.priors, setup.family);
  if (ctx.priors.k_init > cfg.k_max) throw DataError("priors.k_init exceeds chain.k_max");

  std::vector<PreparedQuery> prepared;
  std::vector<MechGroup> groups;
  for (const auto& q : setup.queries) {
    PreparedQuery p{&q, {}, 0};
    if (!ctx.arms.admits(q.level))
      throw EstimandError("query '" + q.name + "': level " + std::to_string(q.level) + " outside treatment support");
    if (q.subgroup) {
      p.mask = q.subgroup->mask(data);
      if (std::none_of(p.mask.begin(), p.mask.end(), [](char c) { return c != 0; }))
        throw EstimandError("query '" + q.name + "': empty subgroup");
    }
    switch (q.kind) {
      case EstimandQuery::Kind::kACate:
        check_assignment(ctx, q.zprime, "zprime", q.name);
        break;
      case EstimandQuery::Kind::kACase:
        check_assignment(ctx, q.zprime, "zprime", q.name);
        check_assignment(ctx, q.zstar, "zstar", q.name);
        break;
      case EstimandQuery::Kind::kEAte:
      case EstimandQuery::Kind::kEAse: {
        if (!q.mech) throw EstimandError("query '" + q.name + "': expected effects need an assignment mechanism");
        if (q.mech->kind() == AssignmentMechanism::Kind::kStratifiedBernoulli && !data.strata)
          throw EstimandError("query '" + q.name + "': stratified mechanism but the data carry no strata");
        auto it = std::find_if(groups.begin(), groups.end(), [&](const MechGroup& g) { return same_mechanism(g.mech, *q.mech); });
        if (it == groups.end()) {
          groups.push_back({*q.mech, {0.0}});
          it = groups.end() - 1;
        }
        if (std::find(it->levels.begin(), it->levels.end(), q.level) == it->levels.end()) it->levels.push_back(q.level);
        p.mech_group = static_cast<std::size_t>(it - groups.begin());
        break;
      }
    }
    prepared.push_back(std::move(p));
  }

  PosteriorDraws out;
  for (const auto& q : setup.queries) out.names.push_back(q.name);
  out.draws.assign(setup.queries.size(), {});

  Rng rng(cfg.seed);
  DdpmState state = init_state(ctx, rng);
  OutcomeModel om = init_outcome(ctx, rng);

  const std::size_t total = cfg.burn_in + cfg.keep * cfg.thin;
  std::vector<ExpectedEffectDraws> mc(groups.size());
  for (std::size_t it = 0; it < total; ++it) {
    step_draw_doi(state, om, ctx, rng);
    step_draw_clusters(state, ctx, rng);
    step_update_sticks(state, rng);
    const auto a = step_mh_alpha(state, ctx.priors, cfg.alpha, rng);
    step_update_atoms(state, ctx, rng);
    if (ctx.family == OutcomeFamily::kGaussian) {
      step_update_outcome_gaussian(om, state, ctx, rng);
    } else {
      step_probit_augmentation(om, state, ctx, cfg.probit_subtract_doi, rng);
      for (std::size_t i = 0; i < ctx.n(); ++i)
        if ((om.aux[i] > 0.0) != (data.y[i] == 1.0)) ++out.probit_sign_violations;
    }

    if (it < cfg.burn_in) {
      if (state.occupied() == state.k()) {
        const auto grown = static_cast<std::size_t>(std::ceil(static_cast<double>(state.k()) * cfg.k_growth));
        if (grown > cfg.k_max) {
          std::ostringstream msg;
          msg << "truncation level would grow to " << grown << " (cap " << cfg.k_max << ") at burn-in iteration " << it
              << " with all " << state.k() << " clusters occupied, alpha = " << state.alpha;
          throw ChainError(msg.str());
        }
        grow_truncation(state, grown, ctx, rng);
      }
      continue;
    }
    if ((it - cfg.burn_in + 1) % cfg.thin != 0) continue;

    if (a.accepted) ++out.alpha_accepts;
    for (std::size_t g = 0; g < groups.size(); ++g)
      mc[g] = draw_expected_effect_samples(state, om, ctx, groups[g].mech, groups[g].levels, cfg.mc_draws, rng,
                                           cfg.impute);
    for (std::size_t qi = 0; qi < prepared.size(); ++qi) {
      const auto& p = prepared[qi];
      const auto& q = *p.query;
      double value = 0.0;
      switch (q.kind) {
        case EstimandQuery::Kind::kACate: {
          const auto g = impute_doi(state, ctx, q.zprime, rng);
          const auto yz = impute_counterfactuals(state, om, ctx, q.level, q.zprime, g, rng, cfg.impute);
          const auto y0 = impute_counterfactuals(state, om, ctx, 0.0, q.zprime, g, rng, cfg.impute);
          value = a_cate(yz, y0, p.mask);
          break;
        }
        case EstimandQuery::Kind::kACase: {
          const auto g1 = impute_doi(state, ctx, q.zprime, rng);
          const auto g2 = impute_doi(state, ctx, q.zstar, rng);
          const auto y1 = impute_counterfactuals(state, om, ctx, q.level, q.zprime, g1, rng, cfg.impute);
          const auto y2 = impute_counterfactuals(state, om, ctx, q.level, q.zstar, g2, rng, cfg.impute);
          value = a_case(y1, y2, p.mask);
          break;
        }
        case EstimandQuery::Kind::kEAte:
          value = e_ate(mc[p.mech_group], q.level, p.mask);
          break;
        case EstimandQuery::Kind::kEAse:
          value = e_ase(mc[p.mech_group], q.level, p.mask);
          break;
      }
      out.draws[qi].push_back(value);
    }
    out.alpha.push_back(state.alpha);
    out.k.push_back(state.k());
    out.occupied.push_back(state.occupied());
    std::vector<double> flat;
    for (const auto& b : om.beta) flat.insert(flat.end(), b.data(), b.data() + b.size());
    out.beta.push_back(std::move(flat));
  }
  out.final_k = state.k();
  return out;
}

void write_trace(const PosteriorDraws& d, std::ostream& out) {
  out << "iteration,alpha,k,occupied";
  for (const auto& n : d.names) out << ',' << n;
  out << '\n';
  std::ostringstream num;
  num.precision(17);
  auto fmt = [&](double v) {
    num.str({});
    num << v;
    return num.str();
  };
  for (std::size_t t = 0; t < d.alpha.size(); ++t) {
    out << t << ',' << fmt(d.alpha[t]) << ',' << d.k[t] << ',' << d.occupied[t];
    for (const auto& col : d.draws) out << ',' << fmt(col[t]);
    out << '\n';
  }
}

}  // namespace doi
