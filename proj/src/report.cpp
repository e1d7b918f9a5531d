#include "doi/report.hpp"

#include <fstream>
#include <sstream>

#include <Eigen/Core>

#include "doi/dataset_io.hpp"
#include "doi/rng.hpp"
#include "format.hpp"
#include "json.hpp"

namespace doi {

using ojson = nlohmann::ordered_json;

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw OutputError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
}

// Writes to a temporary sibling then renames, so a crash never leaves a half-written report.
template <class F>
void write_file(const std::filesystem::path& path, F&& body) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw OutputError("error writing " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw OutputError("cannot write " + path.string() + ": " + ec.message());
}

ojson versions() {
  ojson v;
  v["doi"] = kVersion;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
#if defined(__clang__)
  v["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  v["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  return v;
}

}  // namespace

void write_summary_csv(std::span<const std::string> names, std::span<const SummaryRow> rows, std::ostream& out) {
  out << "query,mean,sd,q2.5,median,q97.5,length\n";
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const auto& r = rows[q];
    out << names[q] << ',' << fmt_num(r.mean) << ',' << fmt_num(r.sd) << ',' << fmt_num(r.q025) << ','
        << fmt_num(r.median) << ',' << fmt_num(r.q975) << ',' << fmt_num(r.length) << '\n';
  }
}

void write_summary_json(std::span<const std::string> names, std::span<const SummaryRow> rows, std::ostream& out) {
  ojson arr = ojson::array();
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const auto& r = rows[q];
    arr.push_back({{"query", names[q]},
                   {"mean", r.mean},
                   {"sd", r.sd},
                   {"q2.5", r.q025},
                   {"median", r.median},
                   {"q97.5", r.q975},
                   {"length", r.length}});
  }
  out << arr.dump(2) << '\n';
}

void write_manifest(const RunConfig& cfg, const std::string& extra, std::ostream& out) {
  ojson m;
  m["config"] = ojson::parse(config_to_json(cfg));
  m["versions"] = versions();
  if (!extra.empty()) {
    const ojson e = ojson::parse(extra);
    for (auto& [k, v] : e.items()) m[k] = v;
  }
  out << m.dump(2) << '\n';
}

FitOutcome run_fit(const RunConfig& cfg) {
  FitOutcome fit;
  auto ing = ingest_dataset(cfg.data_path, cfg.edges_path, cfg.family, cfg.treatment);
  fit.log = ing.log;
  bool needs_scores = false;
  for (const auto& t : cfg.features.terms) needs_scores |= t.kind == FeatureTerm::Kind::kScoredTreatedSum;
  if (needs_scores && !ing.data.scores) {
    ing.data.scores = pagerank(ing.data.net, cfg.pagerank).scores;
    fit.log.push_back("no score column: using PageRank scores of the network");
  }
  ChainSetup setup;
  setup.spec = cfg.features;
  setup.priors = cfg.priors;
  setup.family = cfg.family;
  setup.cfg = cfg.chain;
  setup.cfg.seed = derive_seed(cfg.seed, Stream::kChain, 0);
  setup.queries = resolve_queries(cfg, ing.data);
  fit.draws = run_chain(ing.data, setup);
  fit.names = fit.draws.names;
  for (const auto& d : fit.draws.draws) fit.rows.push_back(summarize(d));
  return fit;
}

void emit_fit_report(const RunConfig& cfg, const FitOutcome& fit, const std::filesystem::path& outdir) {
  ensure_dir(outdir);
  write_file(outdir / "summary.csv", [&](std::ostream& o) { write_summary_csv(fit.names, fit.rows, o); });
  write_file(outdir / "summary.json", [&](std::ostream& o) { write_summary_json(fit.names, fit.rows, o); });
  write_file(outdir / "trace.csv", [&](std::ostream& o) { write_trace(fit.draws, o); });
  ojson extra;
  extra["chain"] = {{"retained", fit.draws.alpha.size()},
                    {"final_k", fit.draws.final_k},
                    {"alpha_accepts", fit.draws.alpha_accepts}};
  if (cfg.family == OutcomeFamily::kProbit) extra["chain"]["probit_sign_violations"] = fit.draws.probit_sign_violations;
  extra["ingest"] = fit.log;
  extra["outputs"] = {"summary.csv", "summary.json", "trace.csv"};
  write_file(outdir / "manifest.json", [&](std::ostream& o) { write_manifest(cfg, extra.dump(), o); });
}

void run_simulate(const RunConfig& cfg, const std::filesystem::path& outdir) {
  const auto& s = cfg.simulate;
  const Network net = s.graph.generate(s.n, derive_seed(cfg.seed, Stream::kGraph, 0));
  const auto pr = pagerank(net, cfg.pagerank);
  const auto sim = dgp_generate(s.dgp, net, pr, derive_seed(cfg.seed, Stream::kDataset, 0));
  const auto mech = AssignmentMechanism::bernoulli(s.dgp.treat_prob);
  const auto truth_seed = derive_seed(cfg.seed, Stream::kTruth, 0);
  const auto ate = true_estimand_mc(sim, TrueEstimand::kEAte, mech, s.truth_draws, truth_seed);
  const auto ase0 = true_estimand_mc(sim, TrueEstimand::kEAse, mech, s.truth_draws, truth_seed, 0.0);
  const auto ase1 = true_estimand_mc(sim, TrueEstimand::kEAse, mech, s.truth_draws, truth_seed, 1.0);

  ensure_dir(outdir);
  write_file(outdir / "data.csv", [&](std::ostream& o) { write_dataset(sim.data, o); });
  write_file(outdir / "edges.csv", [&](std::ostream& o) { write_edge_list(net, o); });
  write_file(outdir / "truth.csv", [&](std::ostream& o) {
    o << "estimand,level,value,std_error\n";
    o << "e_ate,1," << fmt_num(ate.value, 17) << ',' << fmt_num(ate.std_error, 17) << '\n';
    o << "e_ase,0," << fmt_num(ase0.value, 17) << ',' << fmt_num(ase0.std_error, 17) << '\n';
    o << "e_ase,1," << fmt_num(ase1.value, 17) << ',' << fmt_num(ase1.std_error, 17) << '\n';
  });
  ojson extra;
  extra["pagerank"] = {{"iterations", pr.iterations}, {"residual", pr.residual}};
  extra["outputs"] = {"data.csv", "edges.csv", "truth.csv"};
  write_file(outdir / "manifest.json", [&](std::ostream& o) { write_manifest(cfg, extra.dump(), o); });
}

BenchmarkResult run_benchmark_command(const RunConfig& cfg) {
  return run_benchmark(cfg.benchmark.grid, benchmark_options(cfg));
}

void emit_benchmark_report(const RunConfig& cfg, const BenchmarkResult& r, const std::filesystem::path& outdir) {
  ensure_dir(outdir);
  write_file(outdir / "benchmark.csv", [&](std::ostream& o) { write_benchmark_csv(r, o); });
  write_file(outdir / "replicates.csv",
             [&](std::ostream& o) { write_replicate_log(r, cfg.benchmark.grid, o); });
  ojson extra;
  extra["outputs"] = {"benchmark.csv", "replicates.csv"};
  write_file(outdir / "manifest.json", [&](std::ostream& o) { write_manifest(cfg, extra.dump(), o); });
}

void execute(const RunConfig& cfg, std::ostream& log) {
  switch (cfg.command) {
    case RunConfig::Command::kFit: {
      const auto fit = run_fit(cfg);
      for (const auto& l : fit.log) log << l << '\n';
      emit_fit_report(cfg, fit, cfg.out);
      log << "wrote " << fit.names.size() << " summary rows to " << cfg.out.string() << '\n';
      break;
    }
    case RunConfig::Command::kSimulate:
      run_simulate(cfg, cfg.out);
      log << "wrote simulated data (N=" << cfg.simulate.n << ") to " << cfg.out.string() << '\n';
      break;
    case RunConfig::Command::kBenchmark: {
      const auto r = run_benchmark_command(cfg);
      emit_benchmark_report(cfg, r, cfg.out);
      log << "wrote " << r.rows.size() << " benchmark rows to " << cfg.out.string() << '\n';
      break;
    }
  }
}

}  // namespace doi
