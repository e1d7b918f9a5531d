#pragma once

// Reading and writing unit-level data files.
//
// Data CSV: header `unit_id,stratum,treatment,outcome,x1,...,xd` with optional
// `score` and `household` columns anywhere after `outcome`. Edge CSV: header
// `src,dst,w` where endpoints are unit ids. Without an edge file a `household`
// column induces complete subgraphs within each household.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "doi/core.hpp"

namespace doi {

struct TreatmentSpec {
  Treatment::Kind kind = Treatment::Kind::kBinary;
  int levels = 1;  ///< categorical only: number of non-control levels
};

struct IngestResult {
  Dataset data;
  std::vector<std::int64_t> unit_ids;  ///< original id of each dense index
  std::optional<std::vector<std::int64_t>> household;
  std::size_t mirrored_edges = 0;  ///< edges given in one direction only
  std::vector<std::string> log;
};

IngestResult ingest_dataset(std::istream& data_csv, std::istream* edges_csv, OutcomeFamily family,
                            const TreatmentSpec& treatment = {});
IngestResult ingest_dataset(const std::filesystem::path& data_csv, const std::optional<std::filesystem::path>& edges_csv,
                            OutcomeFamily family, const TreatmentSpec& treatment = {});

/// Writes the data CSV with unit ids 0..N-1; scores and households are
/// included when present.
void write_dataset(const Dataset& data, std::ostream& out,
                   const std::optional<std::vector<std::int64_t>>& household = std::nullopt);

}  // namespace doi
