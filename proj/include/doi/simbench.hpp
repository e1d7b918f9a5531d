#pragma once

// Simulation study: the five data-generating mechanisms, their ground-truth
// expected effects, and bias/MSE/coverage of the DoI sampler against the
// Horvitz-Thompson baseline.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "doi/chain.hpp"
#include "doi/core.hpp"
#include "doi/network.hpp"

namespace doi {

struct DgpConfig {
  int scenario = 1;
  double beta0 = -1.0;
  double beta1 = 1.5;
  double tau = 5.0;
  double psi1 = 2.0;
  double psi2 = 0.2;
  double treat_prob = 0.5;
  double noise_sd = 1.0;

  void validate() const;
};

/// A generated dataset together with everything needed to evaluate any
/// potential outcome Y_i(z_i, z_{-i}).
struct SimulatedData {
  DgpConfig cfg;
  Dataset data;
  std::vector<double> noise;

  /// S_i(z) = sum_j [P_j] z_j A_ij / (|N_i| + 1); scores enter for scenarios 2-5.
  double spillover_term(std::size_t i, std::span<const double> z) const;
  /// Y_i(zi, z_{-i}); the noise term is the unit's realized draw when `with_noise`.
  double potential_outcome(std::size_t i, double zi, std::span<const double> z, bool with_noise = true) const;
  /// Y_i(1, z_{-i}) - Y_i(0, z_{-i}) in closed form (noise cancels).
  double treatment_contrast(std::size_t i, std::span<const double> z) const;
  /// Y_i(zi, z_{-i}) - Y_i(zi, 0_{-i}) in closed form (noise cancels).
  double spillover_contrast(std::size_t i, double zi, std::span<const double> z) const;
};

SimulatedData dgp_generate(const DgpConfig& cfg, const Network& net, const std::optional<PageRankScores>& scores,
                           std::uint64_t seed);

enum class TrueEstimand { kEAte, kEAse };

struct TruthEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo average over `n_draws` assignments from `mech` of the unit-averaged
/// contrast. `level` is the own-treatment level for the spillover contrast.
TruthEstimate true_estimand_mc(const SimulatedData& sim, TrueEstimand which, const AssignmentMechanism& mech,
                               std::size_t n_draws, std::uint64_t seed, double level = 0.0);

struct GraphSpec {
  enum class Family { kErdosRenyi, kBarabasiAlbert };
  Family family = Family::kErdosRenyi;
  double p = 0.01;
  std::size_t n0 = 10;
  std::size_t k = 3;

  std::string family_name() const;
  /// "p=0.01" or "n0=10;k=3".
  std::string params() const;
  Network generate(std::size_t n, std::uint64_t seed) const;
};

struct BenchmarkCell {
  int scenario = 1;
  GraphSpec graph;
  std::size_t n = 300;
  std::size_t n_sim = 50;
};

struct BenchmarkOptions {
  ChainConfig chain;
  Priors priors;
  DgpConfig dgp;  ///< scenario field is overridden per cell
  FeatureSpec spec{{{FeatureTerm::Kind::kWeightedTreatedSum}, {FeatureTerm::Kind::kScoredTreatedSum}}};
  std::size_t truth_draws = 1000;
  double ase_level = 0.0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool record_wall_time = false;
  PageRankOptions pagerank;
};

struct MetricsRow {
  double bias = 0.0;
  double mse = 0.0;
  double coverage = 0.0;
  std::size_t n_sim = 0;
};

struct ReplicateRecord {
  std::size_t cell = 0;
  std::size_t replicate = 0;
  std::string method;
  double truth = 0.0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double seconds = 0.0;
};

/// bias = mean(truth - estimate), mse = mean((truth - estimate)^2), coverage =
/// fraction of [lower, upper] containing truth.
MetricsRow compute_metrics(std::span<const ReplicateRecord> records);

struct BenchmarkResultRow {
  BenchmarkCell cell;
  std::string method;
  MetricsRow metrics;
  std::optional<double> wall_seconds;
};

struct BenchmarkResult {
  std::vector<BenchmarkResultRow> rows;
  std::vector<ReplicateRecord> replicates;
};

/// Methods reported per cell.
inline const char* const kMethodHt = "HT";
inline const char* const kMethodDoi = "DoI";
inline const char* const kMethodDoiAse = "DoI-ASE";

/// One replicate: fresh graph and dataset, HT and a DoI chain.
std::vector<ReplicateRecord> run_replicate(const BenchmarkCell& cell, std::size_t cell_index, std::size_t replicate,
                                           const BenchmarkOptions& opts);

BenchmarkResult run_benchmark(std::span<const BenchmarkCell> grid, const BenchmarkOptions& opts);

/// Household-clustered binary-outcome data: units grouped into households of
/// 1-4 members, complete subgraphs within households, a probit outcome that
/// responds to own and sibling treatment.
struct HouseholdConfig {
  std::size_t n_households = 1012;
  double treat_prob = 0.5;
  double intercept = -0.2;
  double own_effect = 0.8;
  double sibling_effect = 0.4;
  double covariate_effect = 0.3;
};

struct HouseholdData {
  Dataset data;
  std::vector<std::int64_t> household;
};

HouseholdData household_probit_data(const HouseholdConfig& cfg, std::uint64_t seed);

void write_benchmark_csv(const BenchmarkResult& r, std::ostream& out);
void write_replicate_log(const BenchmarkResult& r, std::span<const BenchmarkCell> grid, std::ostream& out);

}  // namespace doi
