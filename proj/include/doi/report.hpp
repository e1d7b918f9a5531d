#pragma once

// Output files for each command and the orchestration that produces them.
//
//   fit:       summary.csv, summary.json, trace.csv, manifest.json
//   simulate:  data.csv, edges.csv, truth.csv, manifest.json
//   benchmark: benchmark.csv, replicates.csv, manifest.json
//
// Every file is a pure function of the resolved config, so reruns overwrite
// with identical bytes.

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "doi/chain.hpp"
#include "doi/config.hpp"
#include "doi/estimands.hpp"

namespace doi {

inline constexpr const char* kVersion = "0.1.0";

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header `query,mean,sd,q2.5,median,q97.5,length`.
void write_summary_csv(std::span<const std::string> names, std::span<const SummaryRow> rows, std::ostream& out);
void write_summary_json(std::span<const std::string> names, std::span<const SummaryRow> rows, std::ostream& out);

/// {"config": ..., "versions": ..., <extra>}. `extra` must be a JSON object text or empty.
void write_manifest(const RunConfig& cfg, const std::string& extra, std::ostream& out);

struct FitOutcome {
  std::vector<std::string> names;
  std::vector<SummaryRow> rows;
  PosteriorDraws draws;
  std::vector<std::string> log;
};

FitOutcome run_fit(const RunConfig& cfg);
void emit_fit_report(const RunConfig& cfg, const FitOutcome& fit, const std::filesystem::path& outdir);

void run_simulate(const RunConfig& cfg, const std::filesystem::path& outdir);

BenchmarkResult run_benchmark_command(const RunConfig& cfg);
void emit_benchmark_report(const RunConfig& cfg, const BenchmarkResult& r, const std::filesystem::path& outdir);

/// Runs the configured command and writes its report into cfg.out; progress
/// lines go to `log`.
void execute(const RunConfig& cfg, std::ostream& log);

}  // namespace doi
