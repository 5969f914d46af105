#include <doctest.h>

#include <cmath>
#include <set>

#include "frontier_rd/error.hpp"
#include "frontier_rd/kv_config.hpp"
#include "frontier_rd/synthetic_dgp.hpp"

using namespace frontier_rd;

namespace {

dgp::DgpParams small_params(std::uint64_t seed) {
  dgp::DgpParams p;
  p.n_settlements = 2000;
  p.n_districts = 40;
  p.n_states = 4;
  p.compliance_jump = 0.4;
  p.baseline_takeup = 0.05;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  const auto a = dgp::generate(small_params(3));
  const auto b = dgp::generate(small_params(3));
  const auto c = dgp::generate(small_params(4));
  REQUIRE(a.size() == 2000);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.settlements()[i];
    const auto& y = b.settlements()[i];
    CHECK(x.settlement_id == y.settlement_id);
    CHECK(x.population_2001 == y.population_2001);
    CHECK(x.area_2001 == y.area_2001);
    CHECK(x.statutory_2011 == y.statutory_2011);
    CHECK(x.outcome("y") == y.outcome("y"));
    differs = differs || x.population_2001 != c.settlements()[i].population_2001;
  }
  CHECK(differs);
}

TEST_CASE("generated rows respect the design and the district layout") {
  auto p = small_params(5);
  p.truncate_to_local = true;
  const auto d = dgp::generate(p);
  std::set<std::string> districts;
  for (const auto& s : d.settlements()) {
    CHECK(design::local_filter(s, p.design));
    CHECK(s.ct_2001 == design::eligibility(s, p.design).z);
    CHECK(s.population_2001 >= 1);
    CHECK(*s.nonag_male_share_2001 > 0.0);
    CHECK(*s.nonag_male_share_2001 < 1.0);
    districts.insert(s.district_id);
  }
  CHECK(districts.size() <= 40);
  CHECK(districts.size() > 30);
}

TEST_CASE("rounded outcomes are nonnegative integers and missing rates apply") {
  auto p = small_params(6);
  p.round_outcomes = true;
  p.outcomes[0].missing_rate = 0.2;
  const auto d = dgp::generate(p);
  std::size_t missing = 0;
  for (const auto& s : d.settlements()) {
    const auto v = s.outcome("y");
    if (!v) {
      ++missing;
      continue;
    }
    CHECK(*v >= 0.0);
    CHECK(*v == std::round(*v));
  }
  CHECK(missing > 300);
  CHECK(missing < 500);
}

TEST_CASE("parameter validation") {
  auto p = small_params(1);
  p.n_districts = 1;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = small_params(1);
  p.cluster_rho = 1.0;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = small_params(1);
  p.compliance_jump = 0.99;
  p.baseline_takeup = 0.5;
  CHECK_THROWS_AS(dgp::generate(p), ParamError);
  p = small_params(1);
  p.outcomes.clear();
  CHECK_THROWS_AS(p.validate(), ParamError);
  CHECK_THROWS_AS(small_params(1).outcome("nope"), SpecError);
}

TEST_CASE("parameters from a config file") {
  const auto cfg = KeyValueConfig::parse_string(
      "n_settlements = 500\nn_districts = 10\nn_states = 2\nseed = 99\n"
      "outcomes = a, b\noutcome.a.late = 3.5\noutcome.b.noise_sd = 0\n");
  const auto p = dgp::DgpParams::from_config(cfg);
  CHECK(p.n_settlements == 500);
  CHECK(p.seed == 99);
  REQUIRE(p.outcomes.size() == 2);
  CHECK(p.outcome("a").late == 3.5);
  CHECK(p.outcome("b").noise_sd == 0.0);
  CHECK_THROWS_AS(dgp::DgpParams::from_config(KeyValueConfig::parse_string("outcome.c.late = 1\n")),
                  ParamError);
  CHECK_THROWS_AS(dgp::DgpParams::from_config(KeyValueConfig::parse_string("n_settlements = 0\n")),
                  ParamError);
  CHECK(dgp::parse_estimator_kind("direct") == dgp::EstimatorKind::direct_effect);
  CHECK_THROWS_AS(dgp::parse_estimator_kind("liml"), ConfigError);
}

TEST_CASE("replication summaries do not depend on the thread count") {
  const auto p = small_params(40);
  dgp::EstimatorSpec spec;
  spec.local = false;
  const auto one = dgp::replicate(p, 6, spec, 1);
  const auto three = dgp::replicate(p, 6, spec, 3);
  CHECK(one.n_reps == 6);
  CHECK(one.n_failed == 0);
  CHECK(one.mean_estimate == three.mean_estimate);
  CHECK(one.sd_estimate == three.sd_estimate);
  CHECK(one.coverage == three.coverage);
  REQUIRE(one.records.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(one.records[i].seed == p.seed + i);
    CHECK(one.records[i].estimate == three.records[i].estimate);
  }
  CHECK(one.truth == 2.0);
  CHECK(one.bias == doctest::Approx(one.mean_estimate - 2.0));
  CHECK_THROWS_AS(dgp::replicate(p, 0, spec), ParamError);
}

TEST_CASE("failed replications are recorded, not thrown") {
  auto p = small_params(50);
  p.compliance_jump = 0.0;
  p.baseline_takeup = 0.0;  // nobody is treated: the first stage is degenerate
  dgp::EstimatorSpec spec;
  spec.local = false;
  const auto s = dgp::replicate(p, 3, spec);
  CHECK(s.n_failed == 3);
  CHECK(s.failure_fraction == 1.0);
  CHECK_FALSE(s.records[0].error.empty());
}
