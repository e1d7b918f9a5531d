#include <cmath>
#include <sstream>

#include "doctest.h"
#include "doi/chain.hpp"
#include "doi/simbench.hpp"
#include "fixtures.hpp"

using namespace doi;

namespace {

using K = FeatureTerm::Kind;

SimulatedData scenario_data(double psi1, std::uint64_t seed, std::size_t n = 300) {
  const auto net = gen_erdos_renyi(n, 0.01, derive_seed(seed, Stream::kGraph));
  const auto pr = pagerank(net);
  DgpConfig cfg;
  cfg.psi1 = psi1;
  return dgp_generate(cfg, net, pr, derive_seed(seed, Stream::kDataset));
}

ChainSetup default_setup(std::size_t burn, std::size_t keep) {
  ChainSetup s;
  s.spec = FeatureSpec{{{K::kWeightedTreatedSum}, {K::kScoredTreatedSum}}};
  s.cfg.burn_in = burn;
  s.cfg.keep = keep;
  s.cfg.seed = 5;
  EstimandQuery ate;
  ate.name = "ate";
  ate.kind = EstimandQuery::Kind::kEAte;
  ate.mech = AssignmentMechanism::bernoulli(0.5);
  EstimandQuery ase;
  ase.name = "ase";
  ase.kind = EstimandQuery::Kind::kEAse;
  ase.level = 0.0;
  ase.mech = AssignmentMechanism::bernoulli(0.5);
  s.queries = {ate, ase};
  return s;
}

}  // namespace

TEST_CASE("chain config validation") {
  ChainConfig c;
  CHECK_NOTHROW(c.validate());
  c.burn_in = 0;
  CHECK_THROWS_AS(c.validate(), DataError);
  c = {};
  c.k_growth = 1.0;
  CHECK_THROWS_AS(c.validate(), DataError);
  c = {};
  c.keep = 0;
  CHECK_THROWS_AS(c.validate(), DataError);
}

TEST_CASE("keep = 1 and determinism") {
  const auto sim = scenario_data(2.0, 1, 60);
  auto setup = default_setup(5, 1);
  const auto a = run_chain(sim.data, setup);
  CHECK(a.draws[0].size() == 1);
  CHECK(a.alpha.size() == 1);

  setup.cfg.keep = 20;
  setup.cfg.thin = 2;
  const auto b = run_chain(sim.data, setup);
  const auto c = run_chain(sim.data, setup);
  CHECK(b.draws == c.draws);
  CHECK(b.alpha == c.alpha);
  CHECK(b.beta == c.beta);
  CHECK(b.draws[0].size() == 20);
  setup.cfg.seed = 6;
  CHECK(run_chain(sim.data, setup).draws != b.draws);
}

TEST_CASE("truncation cap aborts with a diagnostic") {
  const auto sim = scenario_data(2.0, 2, 60);
  auto setup = default_setup(50, 5);
  setup.priors.k_init = 2;
  setup.cfg.k_max = 3;
  // Two clusters are almost always both occupied early on; growth to 4 exceeds the cap.
  try {
    run_chain(sim.data, setup);
    FAIL("expected the truncation cap to trigger");
  } catch (const ChainError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cap 3") != std::string::npos);
    CHECK(msg.find("burn-in iteration") != std::string::npos);
  }
}

TEST_CASE("query validation") {
  const auto sim = scenario_data(2.0, 3, 40);
  auto setup = default_setup(5, 2);
  setup.queries[0].level = 2.0;
  CHECK_THROWS_AS(run_chain(sim.data, setup), EstimandError);

  setup = default_setup(5, 2);
  setup.queries[0].mech.reset();
  CHECK_THROWS_AS(run_chain(sim.data, setup), EstimandError);

  setup = default_setup(5, 2);
  EstimandQuery cate;
  cate.name = "cate";
  cate.kind = EstimandQuery::Kind::kACate;
  cate.zprime = std::vector<double>(39, 0.0);
  setup.queries.push_back(cate);
  CHECK_THROWS_AS(run_chain(sim.data, setup), EstimandError);

  setup = default_setup(5, 2);
  setup.queries[1].subgroup = Subgroup{std::size_t{1000}, std::nullopt, 0.01};
  CHECK_THROWS_AS(run_chain(sim.data, setup), EstimandError);

  setup = default_setup(5, 2);
  setup.queries[0].mech = AssignmentMechanism::stratified({{0, 0.5}});
  CHECK_THROWS_AS(run_chain(sim.data, setup), EstimandError);
}

TEST_CASE("assignment-conditional queries") {
  const auto sim = scenario_data(2.0, 4, 80);
  auto setup = default_setup(20, 30);
  EstimandQuery cate;
  cate.name = "cate";
  cate.kind = EstimandQuery::Kind::kACate;
  cate.zprime = sim.data.z.values;
  EstimandQuery same;
  same.name = "case_same";
  same.kind = EstimandQuery::Kind::kACase;
  same.level = 0.0;
  same.zprime = sim.data.z.values;
  same.zstar = sim.data.z.values;
  setup.queries = {cate, same};
  const auto d = run_chain(sim.data, setup);
  // Both sides are independent imputations of the same quantity.
  CHECK(std::abs(summarize(d.of("case_same")).mean) < 0.1);
  CHECK(std::isfinite(summarize(d.of("cate")).mean));
}

TEST_CASE("trace export") {
  const auto sim = scenario_data(2.0, 5, 40);
  const auto d = run_chain(sim.data, default_setup(5, 3));
  std::ostringstream out;
  write_trace(d, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,alpha,k,occupied,ate,ase");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("scenario 1 recovers the expected treatment effect") {
  const auto sim = scenario_data(2.0, 11);
  const auto d = run_chain(sim.data, default_setup(500, 500));
  const double post_mean = summarize(d.of("ate")).mean;
  CHECK(std::abs(post_mean - 5.0) < 0.3);
}

TEST_CASE("no interference: E-ASE posterior centred at zero") {
  const auto sim = scenario_data(0.0, 12);
  const auto d = run_chain(sim.data, default_setup(300, 300));
  const auto s = summarize(d.of("ase"));
  CHECK(std::abs(s.mean) <= 2.0 * s.sd);
}

TEST_CASE("categorical and continuous treatments run end to end") {
  auto net = gen_erdos_renyi(60, 0.05, 3);
  Rng rng(2);
  std::vector<double> zc(60);
  std::vector<double> zr(60);
  std::vector<double> y(60);
  for (std::size_t i = 0; i < 60; ++i) {
    zc[i] = static_cast<double>(rng.uniform_index(4));
    zr[i] = rng.uniform() * 2.0;
    y[i] = rng.normal() + zc[i];
  }
  auto d = fixtures::dataset(net, std::vector<double>(60, 0.0), y);
  d.z = Treatment::categorical(3, zc);
  ChainSetup setup;
  setup.spec = FeatureSpec{{{K::kTreatedFraction}}};
  setup.cfg.burn_in = 20;
  setup.cfg.keep = 10;
  EstimandQuery q;
  q.name = "level3";
  q.kind = EstimandQuery::Kind::kEAte;
  q.level = 3.0;
  q.mech = AssignmentMechanism::bernoulli(0.5);
  setup.queries = {q};
  CHECK(run_chain(d, setup).of("level3").size() == 10);

  d.z = Treatment::continuous(zr);
  setup.spec = FeatureSpec{{{K::kWeightedTreatedSum}}};
  q.kind = EstimandQuery::Kind::kACate;
  q.level = 1.5;
  q.mech.reset();
  q.zprime = zr;
  setup.queries = {q};
  CHECK(run_chain(d, setup).of("level3").size() == 10);
}

TEST_CASE("probit chain keeps the latent-sign invariant") {
  HouseholdConfig hc;
  hc.n_households = 60;
  const auto hh = household_probit_data(hc, 4);
  ChainSetup setup;
  setup.family = OutcomeFamily::kProbit;
  setup.spec = FeatureSpec{{{K::kTreatedFraction}}};
  setup.cfg.burn_in = 50;
  setup.cfg.keep = 50;
  EstimandQuery q;
  q.name = "ate";
  q.mech = AssignmentMechanism::bernoulli(0.5);
  setup.queries = {q};
  const auto d = run_chain(hh.data, setup);
  CHECK(d.probit_sign_violations == 0);
  for (double v : d.of("ate")) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}
