#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "doi/core.hpp"
#include "doi/ddpm.hpp"
#include "doi/estimands.hpp"

namespace doi {

struct ChainConfig {
  std::size_t burn_in = 500;
  std::size_t keep = 500;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  double k_growth = 2.0;
  std::size_t k_max = 1024;
  /// Monte Carlo replicates of Z* per iteration for expected effects.
  std::size_t mc_draws = 1;
  AlphaOptions alpha;
  /// Probit coefficient regression on v - G^o (true) or on v alone.
  bool probit_subtract_doi = true;
  ImputeOptions impute;

  void validate() const;
};

struct PosteriorDraws {
  std::vector<std::string> names;
  std::vector<std::vector<double>> draws;  ///< per query, `keep` values each
  std::vector<double> alpha;
  std::vector<std::size_t> k;
  std::vector<std::size_t> occupied;
  std::vector<std::vector<double>> beta;  ///< per retained draw, all arms flattened
  std::size_t alpha_accepts = 0;
  /// Probit only: latent utilities whose sign disagreed with the outcome, summed over all iterations.
  std::size_t probit_sign_violations = 0;
  std::size_t final_k = 0;

  const std::vector<double>& of(const std::string& name) const;
};

struct ChainSetup {
  FeatureSpec spec;
  Priors priors;
  OutcomeFamily family = OutcomeFamily::kGaussian;
  ChainConfig cfg;
  std::vector<EstimandQuery> queries;
};

/// Runs burn-in then `keep * thin` retained iterations. Each iteration sweeps
/// the DoI, labels, sticks, concentration, atoms and outcome parameters, then
/// imputes whatever the queries need. During burn-in the truncation grows by
/// `k_growth` whenever every cluster is occupied.
PosteriorDraws run_chain(const Dataset& data, const ChainSetup& setup);

/// CSV with columns iteration,alpha,k,occupied,<query names...>.
void write_trace(const PosteriorDraws& d, std::ostream& out);

}  // namespace doi
