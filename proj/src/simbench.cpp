#include "doi/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "format.hpp"

namespace doi {

void DgpConfig::validate() const {
  if (scenario < 1 || scenario > 5) throw DataError("dgp.scenario must be 1..5");
  if (!(treat_prob >= 0.0 && treat_prob <= 1.0)) throw DataError("dgp.treat_prob must lie in [0, 1]");
  if (!(noise_sd >= 0.0)) throw DataError("dgp.noise_sd must be >= 0");
}

double SimulatedData::spillover_term(std::size_t i, std::span<const double> z) const {
  const auto nb = data.net.neighbors(i);
  const auto wt = data.net.weights(i);
  const bool scored = cfg.scenario >= 2;
  double s = 0.0;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const double pj = scored ? (*data.scores)[nb[k]] : 1.0;
    s += pj * z[nb[k]] * wt[k];
  }
  return s / (static_cast<double>(nb.size()) + 1.0);
}

namespace {

double linear_part(const SimulatedData& sim, std::size_t i) {
  const auto r = static_cast<Eigen::Index>(i);
  return sim.data.x(r, 0) * sim.cfg.beta0 + sim.data.x(r, 1) * sim.cfg.beta1;
}

// Noise-free outcome given the own treatment and the spillover term.
double structural(const DgpConfig& c, double base, double zi, double s) {
  switch (c.scenario) {
    case 1:
    case 2:
      return base + zi * c.tau + c.psi1 * s;
    case 3:
      return (base + c.psi1 * s) * std::exp(c.psi2 * zi * s);
    case 4:
      return (base + zi * c.tau + c.psi1 * s) * std::exp(c.psi2 * zi * s);
    case 5:
      return (base + zi * c.tau + c.psi1 * s) * std::cos(std::numbers::pi * c.psi2 * s);
  }
  throw DataError("unknown scenario");
}

}  // namespace

double SimulatedData::potential_outcome(std::size_t i, double zi, std::span<const double> z, bool with_noise) const {
  const double y = structural(cfg, linear_part(*this, i), zi, spillover_term(i, z));
  return with_noise ? y + noise[i] : y;
}

double SimulatedData::treatment_contrast(std::size_t i, std::span<const double> z) const {
  const double s = spillover_term(i, z);
  const double base = linear_part(*this, i);
  switch (cfg.scenario) {
    case 1:
    case 2:
      return cfg.tau;
    case 3:
      return (base + cfg.psi1 * s) * (std::exp(cfg.psi2 * s) - 1.0);
    case 4:
      return (base + cfg.tau + cfg.psi1 * s) * std::exp(cfg.psi2 * s) - (base + cfg.psi1 * s);
    case 5:
      return cfg.tau * std::cos(std::numbers::pi * cfg.psi2 * s);
  }
  throw DataError("unknown scenario");
}

double SimulatedData::spillover_contrast(std::size_t i, double zi, std::span<const double> z) const {
  const double s = spillover_term(i, z);
  const double base = linear_part(*this, i);
  switch (cfg.scenario) {
    case 1:
    case 2:
      return cfg.psi1 * s;
    case 3:
      return (base + cfg.psi1 * s) * std::exp(cfg.psi2 * zi * s) - base;
    case 4:
      return (base + zi * cfg.tau + cfg.psi1 * s) * std::exp(cfg.psi2 * zi * s) - (base + zi * cfg.tau);
    case 5:
      return (base + zi * cfg.tau + cfg.psi1 * s) * std::cos(std::numbers::pi * cfg.psi2 * s) - (base + zi * cfg.tau);
  }
  throw DataError("unknown scenario");
}

SimulatedData dgp_generate(const DgpConfig& cfg, const Network& net, const std::optional<PageRankScores>& scores,
                           std::uint64_t seed) {
  cfg.validate();
  const std::size_t n = net.size();
  if (cfg.scenario >= 2 && !scores) throw DataError("scenarios 2-5 need PageRank scores");
  if (scores && scores->scores.size() != n) throw DataError("score vector length does not match the network");
  Rng rng(seed);
  SimulatedData sim;
  sim.cfg = cfg;
  sim.data.net = net;
  if (scores) sim.data.scores = scores->scores;
  sim.data.x.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    sim.data.x(static_cast<Eigen::Index>(i), 0) = 1.0;
    sim.data.x(static_cast<Eigen::Index>(i), 1) = rng.normal();
  }
  std::vector<double> z(n);
  for (auto& v : z) v = rng.uniform() < cfg.treat_prob ? 1.0 : 0.0;
  sim.data.z = Treatment::binary(std::move(z));
  sim.noise.resize(n);
  for (auto& e : sim.noise) e = cfg.noise_sd * rng.normal();
  sim.data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) sim.data.y[i] = sim.potential_outcome(i, sim.data.z.values[i], sim.data.z.values);
  return sim;
}

TruthEstimate true_estimand_mc(const SimulatedData& sim, TrueEstimand which, const AssignmentMechanism& mech,
                               std::size_t n_draws, std::uint64_t seed, double level) {
  if (n_draws < 1) throw DataError("true estimand needs at least one Monte Carlo draw");
  const std::size_t n = sim.data.size();
  const std::span<const std::int64_t> strata =
      sim.data.strata ? std::span<const std::int64_t>(*sim.data.strata) : std::span<const std::int64_t>();
  Rng rng(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t d = 0; d < n_draws; ++d) {
    const auto z = mech.sample(n, strata, rng);
    double avg = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      avg += which == TrueEstimand::kEAte ? sim.treatment_contrast(i, z) : sim.spillover_contrast(i, level, z);
    avg /= static_cast<double>(n);
    sum += avg;
    sum_sq += avg * avg;
  }
  const double nd = static_cast<double>(n_draws);
  TruthEstimate t;
  t.value = sum / nd;
  if (n_draws > 1) t.std_error = std::sqrt(std::max(0.0, (sum_sq - nd * t.value * t.value) / (nd - 1.0)) / nd);
  return t;
}

std::string GraphSpec::family_name() const { return family == Family::kErdosRenyi ? "ER" : "BA"; }

std::string GraphSpec::params() const {
  if (family == Family::kErdosRenyi) return "p=" + fmt_num(p);
  return "n0=" + std::to_string(n0) + ";k=" + std::to_string(k);
}

Network GraphSpec::generate(std::size_t n, std::uint64_t seed) const {
  if (family == Family::kErdosRenyi) return gen_erdos_renyi(n, p, seed);
  return gen_barabasi_albert(n, n0, k, seed);
}

MetricsRow compute_metrics(std::span<const ReplicateRecord> records) {
  MetricsRow m;
  m.n_sim = records.size();
  if (records.empty()) return m;
  std::size_t covered = 0;
  for (const auto& r : records) {
    const double err = r.truth - r.estimate;
    m.bias += err;
    m.mse += err * err;
    if (r.lower <= r.truth && r.truth <= r.upper) ++covered;
  }
  const double ns = static_cast<double>(records.size());
  m.bias /= ns;
  m.mse /= ns;
  m.coverage = static_cast<double>(covered) / ns;
  return m;
}

std::vector<ReplicateRecord> run_replicate(const BenchmarkCell& cell, std::size_t cell_index, std::size_t replicate,
                                           const BenchmarkOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t base = derive_seed(opts.seed, Stream::kReplicate, cell_index);
  const Network net = cell.graph.generate(cell.n, derive_seed(base, Stream::kGraph, replicate));
  const PageRankScores pr = pagerank(net, opts.pagerank);
  DgpConfig dgp = opts.dgp;
  dgp.scenario = cell.scenario;
  const SimulatedData sim = dgp_generate(dgp, net, pr, derive_seed(base, Stream::kDataset, replicate));
  const auto mech = AssignmentMechanism::bernoulli(dgp.treat_prob);

  const auto truth_ate =
      true_estimand_mc(sim, TrueEstimand::kEAte, mech, opts.truth_draws, derive_seed(base, Stream::kTruth, replicate));
  const auto truth_ase = true_estimand_mc(sim, TrueEstimand::kEAse, mech, opts.truth_draws,
                                          derive_seed(base, Stream::kTruth, replicate), opts.ase_level);

  std::vector<ReplicateRecord> out;
  const auto ht = ht_e_ate(sim.data, dgp.treat_prob);
  out.push_back({cell_index, replicate, kMethodHt, truth_ate.value, ht.estimate, ht.lower, ht.upper, 0.0});

  ChainSetup setup;
  setup.spec = opts.spec;
  setup.priors = opts.priors;
  setup.cfg = opts.chain;
  setup.cfg.seed = derive_seed(base, Stream::kChain, replicate);
  EstimandQuery ate;
  ate.name = "e_ate";
  ate.mech = mech;
  EstimandQuery ase;
  ase.name = "e_ase";
  ase.kind = EstimandQuery::Kind::kEAse;
  ase.level = opts.ase_level;
  ase.mech = mech;
  setup.queries = {ate, ase};
  PosteriorDraws post;
  try {
    post = run_chain(sim.data, setup);
  } catch (const std::exception& e) {
    throw ChainError("cell " + std::to_string(cell_index) + " replicate " + std::to_string(replicate) + ": " + e.what());
  }
  const auto s_ate = summarize(post.of("e_ate"));
  const auto s_ase = summarize(post.of("e_ase"));
  out.push_back({cell_index, replicate, kMethodDoi, truth_ate.value, s_ate.mean, s_ate.q025, s_ate.q975, 0.0});
  out.push_back({cell_index, replicate, kMethodDoiAse, truth_ase.value, s_ase.mean, s_ase.q025, s_ase.q975, 0.0});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& r : out) r.seconds = secs;
  return out;
}

BenchmarkResult run_benchmark(std::span<const BenchmarkCell> grid, const BenchmarkOptions& opts) {
  struct Task {
    std::size_t cell;
    std::size_t rep;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < grid.size(); ++c)
    for (std::size_t r = 0; r < grid[c].n_sim; ++r) tasks.push_back({c, r});

  std::vector<std::vector<ReplicateRecord>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      {
        std::lock_guard lock(failure_mu);
        if (failure) return;
      }
      try {
        results[t] = run_replicate(grid[tasks[t].cell], tasks[t].cell, tasks[t].rep, opts);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(opts.threads, tasks.size()));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  BenchmarkResult out;
  for (auto& r : results) out.replicates.insert(out.replicates.end(), r.begin(), r.end());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (const char* method : {kMethodHt, kMethodDoi, kMethodDoiAse}) {
      std::vector<ReplicateRecord> sel;
      double secs = 0.0;
      for (const auto& r : out.replicates) {
        if (r.cell == c && r.method == method) {
          sel.push_back(r);
          secs += r.seconds;
        }
      }
      BenchmarkResultRow row{grid[c], method, compute_metrics(sel), std::nullopt};
      if (opts.record_wall_time) row.wall_seconds = secs;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

HouseholdData household_probit_data(const HouseholdConfig& cfg, std::uint64_t seed) {
  if (cfg.n_households < 1) throw DataError("household data needs at least one household");
  Rng rng(seed);
  HouseholdData out;
  const std::vector<double> size_weights{0.3, 0.35, 0.25, 0.1};
  for (std::size_t h = 0; h < cfg.n_households; ++h) {
    const std::size_t m = rng.categorical(size_weights) + 1;
    for (std::size_t j = 0; j < m; ++j) out.household.push_back(static_cast<std::int64_t>(h));
  }
  const std::size_t n = out.household.size();
  Dataset& d = out.data;
  d.net = group_network(out.household);
  d.strata = out.household;
  d.x.resize(static_cast<Eigen::Index>(n), 2);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.x(static_cast<Eigen::Index>(i), 0) = 1.0;
    d.x(static_cast<Eigen::Index>(i), 1) = rng.normal();
    z[i] = rng.uniform() < cfg.treat_prob ? 1.0 : 0.0;
  }
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = d.net.neighbors(i);
    double frac = 0.0;
    for (auto j : nb) frac += z[j];
    if (!nb.empty()) frac /= static_cast<double>(nb.size());
    const double u = cfg.intercept + cfg.covariate_effect * d.x(static_cast<Eigen::Index>(i), 1) +
                     cfg.own_effect * z[i] + cfg.sibling_effect * frac + rng.normal();
    d.y[i] = u > 0.0 ? 1.0 : 0.0;
  }
  d.z = Treatment::binary(std::move(z));
  return out;
}

void write_benchmark_csv(const BenchmarkResult& r, std::ostream& out) {
  out << "scenario,graph,params,N,method,bias,mse,coverage,n_sim,wall_seconds\n";
  for (const auto& row : r.rows) {
    out << row.cell.scenario << ',' << row.cell.graph.family_name() << ',' << row.cell.graph.params() << ','
        << row.cell.n << ',' << row.method << ',' << fmt_num(row.metrics.bias) << ',' << fmt_num(row.metrics.mse) << ','
        << fmt_num(row.metrics.coverage) << ',' << row.metrics.n_sim << ','
        << (row.wall_seconds ? fmt_num(*row.wall_seconds, 4) : std::string("NA")) << '\n';
  }
}

void write_replicate_log(const BenchmarkResult& r, std::span<const BenchmarkCell> grid, std::ostream& out) {
  out << "cell,scenario,graph,params,N,replicate,method,truth,estimate,lower,upper\n";
  for (const auto& rec : r.replicates) {
    const auto& cell = grid[rec.cell];
    out << rec.cell << ',' << cell.scenario << ',' << cell.graph.family_name() << ',' << cell.graph.params() << ','
        << cell.n << ',' << rec.replicate << ',' << rec.method << ',' << fmt_num(rec.truth, 17) << ','
        << fmt_num(rec.estimate, 17) << ',' << fmt_num(rec.lower, 17) << ',' << fmt_num(rec.upper, 17) << '\n';
  }
}

}  // namespace doi
