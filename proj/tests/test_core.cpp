#include <cmath>

#include "doctest.h"
#include "doi/core.hpp"
#include "fixtures.hpp"

using namespace doi;

namespace {

using K = FeatureTerm::Kind;

FeatureSpec spec_of(std::initializer_list<FeatureTerm> t) { return FeatureSpec{t}; }

}  // namespace

TEST_CASE("feature terms on hand-built neighbourhoods") {
  // Unit 0 has neighbours 1, 2, 3; unit 4 is isolated.
  std::vector<Network::Edge> e{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}};
  auto d = fixtures::dataset(Network(5, e), {0, 1, 1, 0, 1}, {0, 0, 0, 0, 0});
  d.scores = std::vector<double>{0.1, 0.2, 0.3, 0.15, 0.25};
  const std::vector<double> z = d.z.values;

  CHECK(eval_features(spec_of({{K::kWeightedTreatedSum}}), d, z, 4)(0) == 0.0);
  CHECK(eval_features(spec_of({{K::kWeightedTreatedSum}}), d, z, 0)(0) == 2.0);
  CHECK(eval_features(spec_of({{K::kNormalizedTreatedSum}}), d, z, 0)(0) == doctest::Approx(0.5));
  CHECK(eval_features(spec_of({{K::kScoredTreatedSum}}), d, z, 0)(0) == doctest::Approx(0.5));
  CHECK(eval_features(spec_of({{K::kTreatedFraction}}), d, z, 0)(0) == doctest::Approx(2.0 / 3.0));
  CHECK(eval_features(spec_of({{K::kTreatedFraction}}), d, z, 4)(0) == 0.0);
  CHECK(eval_features(spec_of({{K::kIntercept}}), d, z, 4)(0) == 1.0);
  // x_{0,1} = -0.2; treated neighbours 1, 2 have x = -0.1, 0.0; |N_0| = 3.
  CHECK(eval_features(spec_of({{K::kCovariateGap, 1}}), d, z, 0)(0) == doctest::Approx(-0.2 - (-0.1 + 0.0) / 3.0));
  CHECK(eval_features(spec_of({{K::kCovariateGap, 1}}), d, z, 4)(0) == doctest::Approx(0.2));
}

TEST_CASE("feature matrix rows match per-unit evaluation and zero assignment") {
  auto d = fixtures::dataset(gen_erdos_renyi(20, 0.3, 5), std::vector<double>(20, 0.0), std::vector<double>(20, 0.0));
  d.scores = pagerank(d.net).scores;
  const auto spec = spec_of({{K::kIntercept}, {K::kWeightedTreatedSum}, {K::kScoredTreatedSum},
                             {K::kNormalizedTreatedSum}, {K::kTreatedFraction}});
  std::vector<double> z(20);
  for (std::size_t i = 0; i < 20; ++i) z[i] = static_cast<double>(i % 3 == 0);
  const auto m = feature_matrix(spec, d, z);
  for (std::size_t i = 0; i < 20; ++i) CHECK((m.row(static_cast<Eigen::Index>(i)).transpose() - eval_features(spec, d, z, i)).norm() == 0.0);

  const std::vector<double> zeros(20, 0.0);
  const auto m0 = feature_matrix(spec, d, zeros);
  CHECK(m0.col(0).minCoeff() == 1.0);
  CHECK(m0.rightCols(4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("features are local: permuting units outside the neighbourhood changes nothing") {
  auto d = fixtures::dataset(gen_erdos_renyi(15, 0.2, 11), std::vector<double>(15, 0.0), std::vector<double>(15, 0.0));
  d.scores = std::vector<double>(15, 1.0 / 15);
  const auto spec = spec_of({{K::kWeightedTreatedSum}, {K::kTreatedFraction}, {K::kCovariateGap, 1}});
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> z(15);
    for (auto& v : z) v = rng.bernoulli(0.5);
    const std::size_t i = rng.uniform_index(15);
    std::vector<std::size_t> outside;
    for (std::size_t j = 0; j < 15; ++j)
      if (j != i && d.net.weight(i, j) == 0.0) outside.push_back(j);
    auto z2 = z;
    for (std::size_t a = 0; a + 1 < outside.size(); a += 2) std::swap(z2[outside[a]], z2[outside[a + 1]]);
    CHECK((eval_features(spec, d, z, i) - eval_features(spec, d, z2, i)).norm() == 0.0);
  }
}

TEST_CASE("feature spec checks") {
  auto d = fixtures::dataset(fixtures::path_graph(3), {0, 1, 0}, {0, 0, 0});
  CHECK_THROWS_AS(spec_of({{K::kScoredTreatedSum}}).check(d), DataError);
  CHECK_THROWS_AS(spec_of({{K::kCovariateGap, 2}}).check(d), DataError);
  CHECK_NOTHROW(spec_of({{K::kCovariateGap, 1}}).check(d));
  for (auto k : {K::kIntercept, K::kWeightedTreatedSum, K::kScoredTreatedSum, K::kNormalizedTreatedSum,
                 K::kTreatedFraction, K::kCovariateGap})
    CHECK(FeatureTerm::parse(FeatureTerm::name(k)) == k);
  CHECK_THROWS(FeatureTerm::parse("nope"));
}

TEST_CASE("assignment sampling") {
  const std::vector<std::int64_t> none;
  CHECK(AssignmentMechanism::bernoulli(1.0).sample(5, none, 3) == std::vector<double>(5, 1.0));
  CHECK(AssignmentMechanism::bernoulli(0.0).sample(5, none, 3) == std::vector<double>(5, 0.0));
  CHECK(AssignmentMechanism::bernoulli(0.3).sample(50, none, 9) == AssignmentMechanism::bernoulli(0.3).sample(50, none, 9));

  const auto mech = AssignmentMechanism::stratified({{1, 0.628}, {2, 0.449}});
  std::vector<std::int64_t> strata(20000);
  for (std::size_t i = 0; i < strata.size(); ++i) strata[i] = i < 10000 ? 1 : 2;
  const auto z = mech.sample(strata.size(), strata, 17);
  double t1 = 0.0;
  double t2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) (i < 10000 ? t1 : t2) += z[i];
  CHECK(std::abs(t1 / 10000 - 0.628) < 0.015);
  CHECK(std::abs(t2 / 10000 - 0.449) < 0.015);
  CHECK_THROWS_AS(mech.sample(10, none, 1), DataError);
  std::vector<std::int64_t> unknown{1, 3};
  CHECK_THROWS_AS(mech.sample(2, unknown, 1), DataError);
}

TEST_CASE("assignment density") {
  CHECK(AssignmentMechanism::bernoulli(0.5).density(std::vector<double>(10, 1.0)) == doctest::Approx(std::pow(2.0, -10)));
  CHECK(AssignmentMechanism::bernoulli(0.5).density(std::vector<double>{}) == 1.0);
  const auto mech = AssignmentMechanism::stratified({{0, 0.6}, {1, 0.4}});
  std::vector<double> z{1, 0};
  std::vector<std::int64_t> s{0, 1};
  CHECK(mech.density(z, s) == doctest::Approx(0.36));

  // Sums to one over all assignments (brute force).
  for (std::size_t n : {1u, 5u, 12u}) {
    std::vector<std::int64_t> strata(n);
    for (std::size_t i = 0; i < n; ++i) strata[i] = static_cast<std::int64_t>(i % 2);
    double total_b = 0.0;
    double total_s = 0.0;
    std::vector<double> zz(n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i) zz[i] = static_cast<double>((mask >> i) & 1);
      total_b += AssignmentMechanism::bernoulli(0.3).density(zz);
      total_s += mech.density(zz, strata);
    }
    CHECK(total_b == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(total_s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("treatment support and dataset validation") {
  CHECK_THROWS_AS(Treatment::binary({0, 2}), DataError);
  CHECK_THROWS_AS(Treatment::categorical(3, {0, 4}), DataError);
  CHECK_THROWS_AS(Treatment::categorical(3, {0.5}), DataError);
  CHECK_NOTHROW(Treatment::categorical(3, {0, 1, 2, 3}));
  CHECK_THROWS_AS(Treatment::continuous({0.0, NAN}), DataError);

  auto d = fixtures::dataset(fixtures::path_graph(3), {0, 1, 0}, {0.5, 1, 0});
  CHECK_NOTHROW(d.validate(OutcomeFamily::kGaussian));
  CHECK_THROWS_AS(d.validate(OutcomeFamily::kProbit), DataError);
  d.y.push_back(1.0);
  CHECK_THROWS_AS(d.validate(OutcomeFamily::kGaussian), DataError);
}

TEST_CASE("prior validation names the field") {
  Priors p;
  CHECK_NOTHROW(p.validate());
  p.beta_var = -1.0;
  try {
    p.validate();
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("priors.beta_var") != std::string::npos);
  }
  Priors q;
  q.k_init = 1;
  CHECK_THROWS_AS(q.validate(), DataError);
}
