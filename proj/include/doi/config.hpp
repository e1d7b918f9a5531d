#pragma once

// Run configuration for the command-line tool. Configs are JSON; unknown keys
// are rejected and every error names the offending field path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doi/chain.hpp"
#include "doi/dataset_io.hpp"
#include "doi/simbench.hpp"

namespace doi {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An assignment named in a query: the realized one, all-control, all-treated
/// or an explicit vector.
struct AssignmentRef {
  enum class Kind { kObserved, kZeros, kOnes, kExplicit };
  Kind kind = Kind::kObserved;
  std::vector<double> values;

  std::vector<double> resolve(const Dataset& data) const;
};

struct QueryConfig {
  std::string name;
  EstimandQuery::Kind kind = EstimandQuery::Kind::kEAte;
  double level = 1.0;
  AssignmentRef zprime;
  AssignmentRef zstar{AssignmentRef::Kind::kZeros, {}};
  std::optional<AssignmentMechanism> mech;  ///< falls back to RunConfig::mechanism
  std::optional<Subgroup> subgroup;
};

struct SimulateConfig {
  std::size_t n = 300;
  GraphSpec graph;
  DgpConfig dgp;
  std::size_t truth_draws = 1000;
};

struct BenchmarkConfig {
  std::vector<BenchmarkCell> grid;
  DgpConfig dgp;
  std::size_t truth_draws = 1000;
  double ase_level = 0.0;
  bool record_wall_time = false;
};

struct RunConfig {
  enum class Command { kFit, kSimulate, kBenchmark };
  Command command = Command::kFit;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  std::size_t threads = 1;

  // fit
  std::filesystem::path data_path;
  std::optional<std::filesystem::path> edges_path;
  OutcomeFamily family = OutcomeFamily::kGaussian;
  TreatmentSpec treatment;
  std::vector<QueryConfig> queries;

  Priors priors;
  ChainConfig chain;
  FeatureSpec features;
  AssignmentMechanism mechanism = AssignmentMechanism::bernoulli(0.5);
  PageRankOptions pagerank;

  SimulateConfig simulate;
  BenchmarkConfig benchmark;

  static std::string command_name(Command c);
};

/// Parses JSON text. Relative paths are resolved against `base_dir`.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

/// The fully resolved config as JSON text (all defaults spelled out). Feeding
/// the result back to parse_config_text yields the same config.
std::string config_to_json(const RunConfig& cfg);

std::vector<EstimandQuery> resolve_queries(const RunConfig& cfg, const Dataset& data);
BenchmarkOptions benchmark_options(const RunConfig& cfg);

}  // namespace doi
