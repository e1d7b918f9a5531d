#include "doi/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace doi {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object; finish() rejects keys nobody asked for.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_.empty() ? "config" : path_, "must be an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return join(path_, key); }

  const json* find(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  bool has(const std::string& key) const { return j_.contains(key); }

  double num(const std::string& key, double def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number()) fail(at(key), "must be a number");
    return v->get<double>();
  }
  std::size_t count(const std::string& key, std::size_t def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<std::int64_t>() < 0) fail(at(key), "must be a non-negative integer");
    return v->get<std::size_t>();
  }
  std::uint64_t u64(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(at(key), "is required");
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
      fail(at(key), "must be a non-negative integer");
    return v->get<std::uint64_t>();
  }
  bool flag(const std::string& key, bool def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(at(key), "must be true or false");
    return v->get<bool>();
  }
  std::string str(const std::string& key, const std::string& def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) fail(at(key), "must be a string");
    return v->get<std::string>();
  }
  std::optional<std::string> opt_str(const std::string& key) {
    const json* v = find(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_string()) fail(at(key), "must be a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!used_.count(k)) fail(at(k), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::filesystem::path resolve_path(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path fp(p);
  if (fp.is_relative() && !base.empty()) fp = base / fp;
  return fp.lexically_normal();
}

template <class F>
void rethrow_as_config(F&& f, const std::string& path = {}) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    if (path.empty()) throw ConfigError(e.what());
    fail(path, e.what());
  }
}

Priors parse_priors(Obj o) {
  Priors p;
  p.beta_var = o.num("beta_var", p.beta_var);
  p.lambda_shape = o.num("lambda_shape", p.lambda_shape);
  p.lambda_scale = o.num("lambda_scale", p.lambda_scale);
  p.gamma_var = o.num("gamma_var", p.gamma_var);
  p.sigma_shape = o.num("sigma_shape", p.sigma_shape);
  p.sigma_scale = o.num("sigma_scale", p.sigma_scale);
  p.alpha_shape = o.num("alpha_shape", p.alpha_shape);
  p.alpha_scale = o.num("alpha_scale", p.alpha_scale);
  p.k_init = o.count("k_init", p.k_init);
  o.finish();
  rethrow_as_config([&] { p.validate(); });
  return p;
}

ChainConfig parse_chain(Obj o) {
  ChainConfig c;
  c.burn_in = o.count("burn_in", c.burn_in);
  c.keep = o.count("keep", c.keep);
  c.thin = o.count("thin", c.thin);
  c.k_growth = o.num("k_growth", c.k_growth);
  c.k_max = o.count("k_max", c.k_max);
  c.mc_draws = o.count("mc_draws", c.mc_draws);
  const auto target = o.str("alpha_target", "stick_posterior");
  if (target == "stick_posterior") {
    c.alpha.target = AlphaTarget::kStickPosterior;
  } else if (target == "stick_prior") {
    c.alpha.target = AlphaTarget::kStickPrior;
  } else {
    fail(o.at("alpha_target"), "must be \"stick_posterior\" or \"stick_prior\"");
  }
  c.alpha.corrected_hastings = o.flag("alpha_hastings", c.alpha.corrected_hastings);
  c.probit_subtract_doi = o.flag("probit_subtract_doi", c.probit_subtract_doi);
  c.impute.mean_only = o.flag("impute_mean_only", c.impute.mean_only);
  c.impute.shared_noise = o.flag("impute_shared_noise", c.impute.shared_noise);
  o.finish();
  rethrow_as_config([&] { c.validate(); });
  return c;
}

FeatureSpec parse_features(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "must be a non-empty array of feature terms");
  FeatureSpec spec;
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string p = path + "[" + std::to_string(t) + "]";
    FeatureTerm term{FeatureTerm::Kind::kIntercept, 0};
    std::string name;
    std::optional<std::string> covariate;
    if (j[t].is_string()) {
      name = j[t].get<std::string>();
    } else if (j[t].is_object()) {
      Obj o(j[t], p);
      name = o.str("term", "");
      covariate = o.opt_str("covariate");
      o.finish();
    } else {
      fail(p, "must be a term name or an object");
    }
    try {
      term.kind = FeatureTerm::parse(name);
    } catch (const std::exception& e) {
      fail(p, e.what());
    }
    if (term.kind == FeatureTerm::Kind::kCovariateGap) {
      if (!covariate || covariate->size() < 2 || (*covariate)[0] != 'x')
        fail(p, "covariate_gap needs \"covariate\": \"x<k>\"");
      std::size_t col = 0;
      try {
        col = std::stoul(covariate->substr(1));
      } catch (const std::exception&) {
        fail(p + ".covariate", "must look like x1, x2, ...");
      }
      if (col < 1) fail(p + ".covariate", "columns are numbered from x1");
      term.column = col - 1;
    } else if (covariate) {
      fail(p + ".covariate", "only covariate_gap takes a covariate");
    }
    spec.terms.push_back(term);
  }
  return spec;
}

AssignmentMechanism parse_mechanism(Obj o) {
  const auto type = o.str("type", "bernoulli");
  AssignmentMechanism m = AssignmentMechanism::bernoulli(0.5);
  if (type == "bernoulli") {
    const double p = o.num("p", 0.5);
    rethrow_as_config([&] { m = AssignmentMechanism::bernoulli(p); }, o.at("p"));
  } else if (type == "stratified") {
    const json* probs = o.find("probs");
    if (!probs || !probs->is_object() || probs->empty()) fail(o.at("probs"), "must be a non-empty object {stratum: p}");
    std::map<std::int64_t, double> sp;
    for (const auto& [k, v] : probs->items()) {
      std::int64_t s = 0;
      try {
        std::size_t pos = 0;
        s = std::stoll(k, &pos);
        if (pos != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        fail(o.at("probs") + "." + k, "stratum labels must be integers");
      }
      if (!v.is_number()) fail(o.at("probs") + "." + k, "must be a number");
      sp[s] = v.get<double>();
    }
    rethrow_as_config([&] { m = AssignmentMechanism::stratified(sp); }, o.at("probs"));
  } else {
    fail(o.at("type"), "must be \"bernoulli\" or \"stratified\"");
  }
  o.finish();
  return m;
}

AssignmentRef parse_assignment(const json& j, const std::string& path) {
  AssignmentRef r;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "observed") {
      r.kind = AssignmentRef::Kind::kObserved;
    } else if (s == "zeros") {
      r.kind = AssignmentRef::Kind::kZeros;
    } else if (s == "ones") {
      r.kind = AssignmentRef::Kind::kOnes;
    } else {
      fail(path, "must be \"observed\", \"zeros\", \"ones\" or an array");
    }
  } else if (j.is_array()) {
    r.kind = AssignmentRef::Kind::kExplicit;
    for (const auto& v : j) {
      if (!v.is_number()) fail(path, "array entries must be numbers");
      r.values.push_back(v.get<double>());
    }
  } else {
    fail(path, "must be \"observed\", \"zeros\", \"ones\" or an array");
  }
  return r;
}

EstimandQuery::Kind parse_kind(const std::string& s, const std::string& path) {
  for (auto k : {EstimandQuery::Kind::kACate, EstimandQuery::Kind::kACase, EstimandQuery::Kind::kEAte,
                 EstimandQuery::Kind::kEAse})
    if (EstimandQuery::kind_name(k) == s) return k;
  fail(path, "must be one of a_cate, a_case, e_ate, e_ase");
}

QueryConfig parse_query(Obj o) {
  QueryConfig q;
  q.kind = parse_kind(o.str("type", "e_ate"), o.at("type"));
  q.name = o.str("name", EstimandQuery::kind_name(q.kind));
  if (q.name.empty()) fail(o.at("name"), "must not be empty");
  q.level = o.num("level", q.kind == EstimandQuery::Kind::kEAse ? 0.0 : 1.0);
  if (const json* v = o.find("zprime")) q.zprime = parse_assignment(*v, o.at("zprime"));
  if (const json* v = o.find("zstar")) q.zstar = parse_assignment(*v, o.at("zstar"));
  if (const json* v = o.find("mechanism")) q.mech = parse_mechanism(Obj(*v, o.at("mechanism")));
  if (const json* v = o.find("subgroup")) {
    Obj s(*v, o.at("subgroup"));
    Subgroup g;
    if (s.has("neighbors")) g.neighbors = s.count("neighbors", 0);
    if (s.has("treated_fraction")) {
      g.treated_fraction = s.num("treated_fraction", 0.0);
      if (!(*g.treated_fraction >= 0.0 && *g.treated_fraction <= 1.0))
        fail(s.at("treated_fraction"), "must lie in [0, 1]");
    }
    g.fraction_tol = s.num("fraction_tol", g.fraction_tol);
    if (!(g.fraction_tol >= 0.0)) fail(s.at("fraction_tol"), "must be >= 0");
    s.finish();
    q.subgroup = g;
  }
  o.finish();
  return q;
}

GraphSpec parse_graph(Obj o) {
  GraphSpec g;
  const auto fam = o.str("family", "ER");
  if (fam == "ER") {
    g.family = GraphSpec::Family::kErdosRenyi;
    g.p = o.num("p", g.p);
    if (!(g.p >= 0.0 && g.p <= 1.0)) fail(o.at("p"), "must lie in [0, 1]");
  } else if (fam == "BA") {
    g.family = GraphSpec::Family::kBarabasiAlbert;
    g.n0 = o.count("n0", g.n0);
    g.k = o.count("k", g.k);
    if (g.n0 < 1) fail(o.at("n0"), "must be >= 1");
    if (g.k < 1 || g.k > g.n0) fail(o.at("k"), "must lie in [1, n0]");
  } else {
    fail(o.at("family"), "must be \"ER\" or \"BA\"");
  }
  o.finish();
  return g;
}

DgpConfig parse_dgp(Obj o, bool with_scenario) {
  DgpConfig d;
  if (with_scenario) d.scenario = static_cast<int>(o.count("scenario", 1));
  if (const json* b = o.find("beta")) {
    if (!b->is_array() || b->size() != 2 || !(*b)[0].is_number() || !(*b)[1].is_number())
      fail(o.at("beta"), "must be an array of two numbers");
    d.beta0 = (*b)[0].get<double>();
    d.beta1 = (*b)[1].get<double>();
  }
  d.tau = o.num("tau", d.tau);
  d.psi1 = o.num("psi1", d.psi1);
  d.psi2 = o.num("psi2", d.psi2);
  d.treat_prob = o.num("treat_prob", d.treat_prob);
  d.noise_sd = o.num("noise_sd", d.noise_sd);
  o.finish();
  if (d.scenario < 1 || d.scenario > 5) fail(o.at("scenario"), "must be 1..5");
  if (!(d.treat_prob >= 0.0 && d.treat_prob <= 1.0)) fail(o.at("treat_prob"), "must lie in [0, 1]");
  if (!(d.noise_sd >= 0.0)) fail(o.at("noise_sd"), "must be >= 0");
  return d;
}

PageRankOptions parse_pagerank(Obj o) {
  PageRankOptions p;
  p.damping = o.num("damping", p.damping);
  p.tol = o.num("tol", p.tol);
  p.max_iter = o.count("max_iter", p.max_iter);
  o.finish();
  if (!(p.damping >= 0.0 && p.damping < 1.0)) fail(o.at("damping"), "must lie in [0, 1)");
  if (!(p.tol > 0.0)) fail(o.at("tol"), "must be positive");
  if (p.max_iter < 1) fail(o.at("max_iter"), "must be >= 1");
  return p;
}

FeatureSpec default_features(RunConfig::Command c) {
  if (c == RunConfig::Command::kBenchmark) return BenchmarkOptions{}.spec;
  return FeatureSpec{{{FeatureTerm::Kind::kWeightedTreatedSum}}};
}

// ---- serialization ----

ojson mechanism_json(const AssignmentMechanism& m) {
  ojson j;
  if (m.kind() == AssignmentMechanism::Kind::kBernoulli) {
    j["type"] = "bernoulli";
    j["p"] = m.probability();
  } else {
    j["type"] = "stratified";
    ojson probs = ojson::object();
    for (const auto& [s, p] : m.stratum_probabilities()) probs[std::to_string(s)] = p;
    j["probs"] = probs;
  }
  return j;
}

ojson assignment_json(const AssignmentRef& r) {
  switch (r.kind) {
    case AssignmentRef::Kind::kObserved:
      return "observed";
    case AssignmentRef::Kind::kZeros:
      return "zeros";
    case AssignmentRef::Kind::kOnes:
      return "ones";
    case AssignmentRef::Kind::kExplicit:
      return r.values;
  }
  return nullptr;
}

ojson graph_json(const GraphSpec& g) {
  ojson j;
  j["family"] = g.family_name();
  if (g.family == GraphSpec::Family::kErdosRenyi) {
    j["p"] = g.p;
  } else {
    j["n0"] = g.n0;
    j["k"] = g.k;
  }
  return j;
}

ojson dgp_json(const DgpConfig& d, bool with_scenario) {
  ojson j;
  if (with_scenario) j["scenario"] = d.scenario;
  j["beta"] = {d.beta0, d.beta1};
  j["tau"] = d.tau;
  j["psi1"] = d.psi1;
  j["psi2"] = d.psi2;
  j["treat_prob"] = d.treat_prob;
  j["noise_sd"] = d.noise_sd;
  return j;
}

std::string family_name(OutcomeFamily f) { return f == OutcomeFamily::kGaussian ? "gaussian" : "probit"; }

std::string treatment_kind_name(Treatment::Kind k) {
  switch (k) {
    case Treatment::Kind::kBinary:
      return "binary";
    case Treatment::Kind::kCategorical:
      return "categorical";
    case Treatment::Kind::kContinuous:
      return "continuous";
  }
  return "binary";
}

}  // namespace

std::vector<double> AssignmentRef::resolve(const Dataset& data) const {
  switch (kind) {
    case Kind::kObserved:
      return data.z.values;
    case Kind::kZeros:
      return std::vector<double>(data.size(), 0.0);
    case Kind::kOnes:
      return std::vector<double>(data.size(), 1.0);
    case Kind::kExplicit:
      return values;
  }
  return {};
}

std::string RunConfig::command_name(Command c) {
  switch (c) {
    case Command::kFit:
      return "fit";
    case Command::kSimulate:
      return "simulate";
    case Command::kBenchmark:
      return "benchmark";
  }
  return "fit";
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Obj o(root, "");
  RunConfig cfg;
  const auto cmd = o.str("command", "");
  if (cmd == "fit") {
    cfg.command = RunConfig::Command::kFit;
  } else if (cmd == "simulate") {
    cfg.command = RunConfig::Command::kSimulate;
  } else if (cmd == "benchmark") {
    cfg.command = RunConfig::Command::kBenchmark;
  } else {
    fail("command", "must be \"fit\", \"simulate\" or \"benchmark\"");
  }
  cfg.seed = o.u64("seed");
  cfg.out = resolve_path(o.str("out", "out"), base_dir);
  cfg.threads = o.count("threads", 1);
  if (cfg.threads < 1) fail("threads", "must be >= 1");

  if (const json* v = o.find("priors")) cfg.priors = parse_priors(Obj(*v, "priors"));
  if (const json* v = o.find("chain")) cfg.chain = parse_chain(Obj(*v, "chain"));
  cfg.features = default_features(cfg.command);
  if (const json* v = o.find("features")) cfg.features = parse_features(*v, "features");
  if (const json* v = o.find("mechanism")) cfg.mechanism = parse_mechanism(Obj(*v, "mechanism"));
  if (const json* v = o.find("pagerank")) cfg.pagerank = parse_pagerank(Obj(*v, "pagerank"));

  if (const json* v = o.find("data")) {
    Obj d(*v, "data");
    const auto path = d.opt_str("path");
    if (path) cfg.data_path = resolve_path(*path, base_dir);
    if (const auto e = d.opt_str("edges")) cfg.edges_path = resolve_path(*e, base_dir);
    const auto fam = d.str("family", "gaussian");
    if (fam == "gaussian") {
      cfg.family = OutcomeFamily::kGaussian;
    } else if (fam == "probit") {
      cfg.family = OutcomeFamily::kProbit;
    } else {
      fail("data.family", "must be \"gaussian\" or \"probit\"");
    }
    if (const json* t = d.find("treatment")) {
      Obj to(*t, "data.treatment");
      const auto kind = to.str("kind", "binary");
      if (kind == "binary") {
        cfg.treatment.kind = Treatment::Kind::kBinary;
      } else if (kind == "categorical") {
        cfg.treatment.kind = Treatment::Kind::kCategorical;
      } else if (kind == "continuous") {
        cfg.treatment.kind = Treatment::Kind::kContinuous;
      } else {
        fail("data.treatment.kind", "must be \"binary\", \"categorical\" or \"continuous\"");
      }
      cfg.treatment.levels = static_cast<int>(to.count("levels", 1));
      if (cfg.treatment.levels < 1) fail("data.treatment.levels", "must be >= 1");
      to.finish();
    }
    d.finish();
  }
  if (cfg.command == RunConfig::Command::kFit && cfg.data_path.empty()) fail("data.path", "is required for fit");

  if (const json* v = o.find("queries")) {
    if (!v->is_array() || v->empty()) fail("queries", "must be a non-empty array");
    for (std::size_t q = 0; q < v->size(); ++q)
      cfg.queries.push_back(parse_query(Obj((*v)[q], "queries[" + std::to_string(q) + "]")));
  } else {
    QueryConfig ate;
    ate.name = "e_ate";
    ate.kind = EstimandQuery::Kind::kEAte;
    ate.level = 1.0;
    QueryConfig ase;
    ase.name = "e_ase";
    ase.kind = EstimandQuery::Kind::kEAse;
    ase.level = 0.0;
    cfg.queries = {ate, ase};
  }
  for (std::size_t a = 0; a < cfg.queries.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (cfg.queries[a].name == cfg.queries[b].name)
        fail("queries[" + std::to_string(a) + "].name", "duplicate query name '" + cfg.queries[a].name + "'");

  if (const json* v = o.find("simulate")) {
    Obj s(*v, "simulate");
    cfg.simulate.n = s.count("n", cfg.simulate.n);
    if (cfg.simulate.n < 1) fail("simulate.n", "must be >= 1");
    if (const json* g = s.find("graph")) cfg.simulate.graph = parse_graph(Obj(*g, "simulate.graph"));
    if (const json* d = s.find("dgp")) cfg.simulate.dgp = parse_dgp(Obj(*d, "simulate.dgp"), true);
    cfg.simulate.truth_draws = s.count("truth_draws", cfg.simulate.truth_draws);
    if (cfg.simulate.truth_draws < 1) fail("simulate.truth_draws", "must be >= 1");
    s.finish();
  }

  if (const json* v = o.find("benchmark")) {
    Obj b(*v, "benchmark");
    const json* grid = b.find("grid");
    if (!grid || !grid->is_array() || grid->empty()) fail("benchmark.grid", "must be a non-empty array of cells");
    for (std::size_t c = 0; c < grid->size(); ++c) {
      const std::string p = "benchmark.grid[" + std::to_string(c) + "]";
      Obj co((*grid)[c], p);
      BenchmarkCell cell;
      cell.scenario = static_cast<int>(co.count("scenario", 1));
      if (cell.scenario < 1 || cell.scenario > 5) fail(p + ".scenario", "must be 1..5");
      if (const json* g = co.find("graph")) cell.graph = parse_graph(Obj(*g, p + ".graph"));
      cell.n = co.count("n", cell.n);
      if (cell.n < 2) fail(p + ".n", "must be >= 2");
      cell.n_sim = co.count("n_sim", cell.n_sim);
      if (cell.n_sim < 1) fail(p + ".n_sim", "must be >= 1");
      co.finish();
      cfg.benchmark.grid.push_back(cell);
    }
    if (const json* d = b.find("dgp")) cfg.benchmark.dgp = parse_dgp(Obj(*d, "benchmark.dgp"), false);
    cfg.benchmark.truth_draws = b.count("truth_draws", cfg.benchmark.truth_draws);
    if (cfg.benchmark.truth_draws < 1) fail("benchmark.truth_draws", "must be >= 1");
    cfg.benchmark.ase_level = b.num("ase_level", cfg.benchmark.ase_level);
    if (cfg.benchmark.ase_level != 0.0 && cfg.benchmark.ase_level != 1.0) fail("benchmark.ase_level", "must be 0 or 1");
    cfg.benchmark.record_wall_time = b.flag("record_wall_time", cfg.benchmark.record_wall_time);
    b.finish();
  } else if (cfg.command == RunConfig::Command::kBenchmark) {
    fail("benchmark", "is required for the benchmark command");
  }
  o.finish();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

std::string config_to_json(const RunConfig& cfg) {
  ojson j;
  j["command"] = RunConfig::command_name(cfg.command);
  j["seed"] = cfg.seed;
  j["out"] = cfg.out.generic_string();
  j["threads"] = cfg.threads;
  const bool fit = cfg.command == RunConfig::Command::kFit;
  const bool bench = cfg.command == RunConfig::Command::kBenchmark;

  if (fit) {
    ojson d;
    d["path"] = cfg.data_path.generic_string();
    d["edges"] = cfg.edges_path ? ojson(cfg.edges_path->generic_string()) : ojson(nullptr);
    d["family"] = family_name(cfg.family);
    d["treatment"] = {{"kind", treatment_kind_name(cfg.treatment.kind)}, {"levels", cfg.treatment.levels}};
    j["data"] = d;
  }
  if (fit || bench) {
    const Priors& p = cfg.priors;
    j["priors"] = {{"beta_var", p.beta_var},     {"lambda_shape", p.lambda_shape}, {"lambda_scale", p.lambda_scale},
                   {"gamma_var", p.gamma_var},   {"sigma_shape", p.sigma_shape},   {"sigma_scale", p.sigma_scale},
                   {"alpha_shape", p.alpha_shape}, {"alpha_scale", p.alpha_scale}, {"k_init", p.k_init}};
    const ChainConfig& c = cfg.chain;
    j["chain"] = {{"burn_in", c.burn_in},
                  {"keep", c.keep},
                  {"thin", c.thin},
                  {"k_growth", c.k_growth},
                  {"k_max", c.k_max},
                  {"mc_draws", c.mc_draws},
                  {"alpha_target", c.alpha.target == AlphaTarget::kStickPosterior ? "stick_posterior" : "stick_prior"},
                  {"alpha_hastings", c.alpha.corrected_hastings},
                  {"probit_subtract_doi", c.probit_subtract_doi},
                  {"impute_mean_only", c.impute.mean_only},
                  {"impute_shared_noise", c.impute.shared_noise}};
    ojson feats = ojson::array();
    for (const auto& t : cfg.features.terms) {
      if (t.kind == FeatureTerm::Kind::kCovariateGap) {
        feats.push_back({{"term", FeatureTerm::name(t.kind)}, {"covariate", "x" + std::to_string(t.column + 1)}});
      } else {
        feats.push_back(FeatureTerm::name(t.kind));
      }
    }
    j["features"] = feats;
  }
  if (fit) {
    j["mechanism"] = mechanism_json(cfg.mechanism);
    ojson qs = ojson::array();
    for (const auto& q : cfg.queries) {
      ojson qj;
      qj["name"] = q.name;
      qj["type"] = EstimandQuery::kind_name(q.kind);
      qj["level"] = q.level;
      if (q.kind == EstimandQuery::Kind::kACate || q.kind == EstimandQuery::Kind::kACase)
        qj["zprime"] = assignment_json(q.zprime);
      if (q.kind == EstimandQuery::Kind::kACase) qj["zstar"] = assignment_json(q.zstar);
      if (q.mech) qj["mechanism"] = mechanism_json(*q.mech);
      if (q.subgroup) {
        ojson s;
        if (q.subgroup->neighbors) s["neighbors"] = *q.subgroup->neighbors;
        if (q.subgroup->treated_fraction) s["treated_fraction"] = *q.subgroup->treated_fraction;
        s["fraction_tol"] = q.subgroup->fraction_tol;
        qj["subgroup"] = s;
      }
      qs.push_back(qj);
    }
    j["queries"] = qs;
  }
  j["pagerank"] = {{"damping", cfg.pagerank.damping}, {"tol", cfg.pagerank.tol}, {"max_iter", cfg.pagerank.max_iter}};
  if (cfg.command == RunConfig::Command::kSimulate) {
    j["simulate"] = {{"n", cfg.simulate.n},
                     {"graph", graph_json(cfg.simulate.graph)},
                     {"dgp", dgp_json(cfg.simulate.dgp, true)},
                     {"truth_draws", cfg.simulate.truth_draws}};
  }
  if (bench) {
    ojson grid = ojson::array();
    for (const auto& c : cfg.benchmark.grid)
      grid.push_back({{"scenario", c.scenario}, {"graph", graph_json(c.graph)}, {"n", c.n}, {"n_sim", c.n_sim}});
    j["benchmark"] = {{"grid", grid},
                      {"dgp", dgp_json(cfg.benchmark.dgp, false)},
                      {"truth_draws", cfg.benchmark.truth_draws},
                      {"ase_level", cfg.benchmark.ase_level},
                      {"record_wall_time", cfg.benchmark.record_wall_time}};
  }
  return j.dump(2);
}

std::vector<EstimandQuery> resolve_queries(const RunConfig& cfg, const Dataset& data) {
  std::vector<EstimandQuery> out;
  for (const auto& q : cfg.queries) {
    EstimandQuery e;
    e.name = q.name;
    e.kind = q.kind;
    e.level = q.level;
    e.subgroup = q.subgroup;
    if (q.kind == EstimandQuery::Kind::kACate || q.kind == EstimandQuery::Kind::kACase) e.zprime = q.zprime.resolve(data);
    if (q.kind == EstimandQuery::Kind::kACase) e.zstar = q.zstar.resolve(data);
    if (q.kind == EstimandQuery::Kind::kEAte || q.kind == EstimandQuery::Kind::kEAse)
      e.mech = q.mech ? *q.mech : cfg.mechanism;
    out.push_back(std::move(e));
  }
  return out;
}

BenchmarkOptions benchmark_options(const RunConfig& cfg) {
  BenchmarkOptions o;
  o.chain = cfg.chain;
  o.priors = cfg.priors;
  o.dgp = cfg.benchmark.dgp;
  o.spec = cfg.features;
  o.truth_draws = cfg.benchmark.truth_draws;
  o.ase_level = cfg.benchmark.ase_level;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  o.record_wall_time = cfg.benchmark.record_wall_time;
  o.pagerank = cfg.pagerank;
  return o;
}

}  // namespace doi
