#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "../support/fixtures.hpp"
#include "frontier_rd/error.hpp"
#include "frontier_rd/rd_design.hpp"

using namespace frontier_rd;
using namespace frontier_rd::design;

TEST_CASE("normalized distances") {
  const DesignConfig cfg;
  const auto r = normalize(7500, 200, 0.9, cfg);
  CHECK(r.r_p == doctest::Approx(0.5));
  CHECK(r.r_d == doctest::Approx(-0.5));
  CHECK(r.r_n == doctest::Approx(0.2));
  CHECK(r.min() == doctest::Approx(-0.5));
  const auto at = normalize(5000, 400, 0.75, cfg);
  CHECK(at.r_p == 0.0);
  CHECK(at.r_d == 0.0);
  CHECK(at.r_n == 0.0);
}

TEST_CASE("undefined running variables raise DesignError naming the field") {
  auto s = fixtures::settlement("X", "D1", 100, 50, 0.5);
  s.density_2001.reset();
  try {
    normalize(s, DesignConfig{});
    FAIL("expected DesignError");
  } catch (const DesignError& e) {
    CHECK(std::string(e.what()).find("density_2001") != std::string::npos);
  }
  s = fixtures::settlement("X", "D1", 100, 50, 0.5);
  s.nonag_male_share_2001.reset();
  CHECK_THROWS_WITH_AS(normalize(s, DesignConfig{}), doctest::Contains("nonag_male_share_2001"),
                       DesignError);
}

TEST_CASE("eligibility at the cutoff follows the inclusive convention") {
  DesignConfig cfg;
  const auto s = fixtures::settlement("X", "D1", 5000, 400, 0.75);
  CHECK(eligibility(s, cfg).z);
  CHECK(eligibility(normalize(s, cfg), cfg).z);
  cfg.cutoffs.inclusive = false;
  const auto e = eligibility(s, cfg);
  CHECK_FALSE(e.z_p);
  CHECK_FALSE(e.z);
  CHECK_FALSE(eligibility(normalize(s, cfg), cfg).z);

  DesignConfig inc;
  auto below = fixtures::settlement("Y", "D1", 5000, 400, 0.75);
  below.nonag_male_share_2001 = std::nextafter(0.75, 0.0);
  CHECK_FALSE(eligibility(below, inc).z_n);
}

TEST_CASE("soft-min frontier bounds and limits") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3, 3);
  for (double tau : {0.001, 0.05, 0.5, 5.0}) {
    for (int i = 0; i < 500; ++i) {
      const double a = u(rng), b = u(rng), c = u(rng);
      const double m = std::min({a, b, c});
      const double f = frontier_distance(a, b, c, tau);
      CHECK(f <= m);
      CHECK(f >= m - tau * std::log(3.0) - 1e-12);
    }
  }
  // equal distances hit the lower bound exactly
  CHECK(frontier_distance(0.2, 0.2, 0.2, 0.05) == doctest::Approx(0.2 - 0.05 * std::log(3.0)));
  // one distance far below the others: the min itself
  CHECK(frontier_distance(-1.0, 5.0, 5.0, 0.05) == doctest::Approx(-1.0));
  // no overflow for distances far beyond exp range
  const double big = frontier_distance(-1e6, 1e6, 1e6, 1e-4);
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(-1e6));
  CHECK(hard_frontier_distance(0.3, -0.1, 0.2) == -0.1);
  CHECK_THROWS_AS(frontier_distance(0, 0, 0, 0.0), DesignError);

  DesignConfig hard;
  hard.frontier_mode = FrontierMode::hard;
  CHECK(frontier_distance(NormalizedDistances{0.3, -0.1, 0.2}, hard) == -0.1);
}

TEST_CASE("local window is joint and closed") {
  const DesignConfig cfg;
  CHECK(local_filter(10000, 800, 0.95, cfg));
  CHECK(local_filter(0, 0, 0.55, cfg));
  CHECK_FALSE(local_filter(10001, 400, 0.75, cfg));
  CHECK_FALSE(local_filter(5000, 801, 0.75, cfg));
  CHECK_FALSE(local_filter(5000, 400, 0.96, cfg));
}

TEST_CASE("design config parsing and validation") {
  const auto cfg = DesignConfig::from_config(KeyValueConfig::parse_string(
      "population_cutoff = 4000\ninclusive_at_cutoff = false\nfrontier_mode = hard\n"
      "softmin_temperature = 0.1\n"));
  CHECK(cfg.cutoffs.population == 4000);
  CHECK_FALSE(cfg.cutoffs.inclusive);
  CHECK(cfg.frontier_mode == FrontierMode::hard);
  const auto back = DesignConfig::from_config(cfg.to_config());
  CHECK(back.cutoffs.population == 4000);
  CHECK(back.softmin_temperature == 0.1);
  CHECK_THROWS_AS(DesignConfig::from_config(KeyValueConfig::parse_string("nonag_bandwidth = -1\n")),
                  ConfigError);
  CHECK_THROWS_AS(DesignConfig::from_config(KeyValueConfig::parse_string("frontier_mode = min\n")),
                  ConfigError);
  CHECK_THROWS_AS(DesignConfig::from_config(KeyValueConfig::parse_string("softmin_temperature = 0\n")),
                  ConfigError);
}

TEST_CASE("build_design keeps dataset order and matches per-row recomputation") {
  auto rows = fixtures::random_settlements(400, 23);
  rows[5].nonag_male_share_2001.reset();
  const auto d = data::Dataset::from_settlements(rows, {}, "mem");
  const DesignConfig cfg;
  const auto des = build_design(d, cfg);
  REQUIRE(des.rows.size() == 399);
  REQUIRE(des.exclusions.size() == 1);
  CHECK(des.exclusions[0].settlement_id == rows[5].settlement_id);
  for (std::size_t k = 0; k < des.rows.size(); ++k) {
    const auto& s = rows[des.source_rows[k]];
    const auto& r = des.rows[k];
    CHECK(r.settlement_id == s.settlement_id);
    CHECK(r.z == (s.population_2001 >= 5000 && *s.density_2001 >= 400 &&
                  *s.nonag_male_share_2001 >= 0.75));
    CHECK(r.in_local_sample == local_filter(s, cfg));
  }
  CHECK(build_design(d, cfg).rows == des.rows);

  std::ostringstream out;
  write_design_csv(des, out);
  const std::string csv = out.str();
  CHECK(csv.rfind("settlement_id,r_p,r_d,r_n,z_p,z_d,z_n,z,frontier,in_local_sample\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 400);
}

TEST_CASE("panel columns, powers and sample masks") {
  auto rows = fixtures::random_settlements(100, 4);
  for (auto& s : rows) s.outcomes.emplace("y", static_cast<double>(s.population_2001));
  auto d = std::make_shared<const data::Dataset>(data::Dataset::from_settlements(rows, {"y"}, "m"));
  const Panel panel(d, DesignConfig{});
  REQUIRE(panel.size() == 100);
  const auto rp = panel.column("r_p");
  const auto rp2 = panel.column("r_p^2");
  const auto y = panel.column("y");
  const auto lp = panel.column("log_population");
  for (std::size_t i = 0; i < panel.size(); ++i) {
    CHECK(rp2[i] == doctest::Approx(rp[i] * rp[i]));
    CHECK(y[i] == doctest::Approx(5000.0 * (rp[i] + 1.0)));
    CHECK(lp[i] == doctest::Approx(std::log(y[i])));
  }
  CHECK_THROWS_AS(panel.column("no_such_column"), SpecError);
  CHECK_FALSE(panel.has_column("r_q"));
  CHECK(panel.has_column("z_n"));
  const auto local = panel.sample_mask(SampleFilter::local);
  const auto never = panel.sample_mask(SampleFilter::never_treated);
  const auto both = panel.sample_mask(SampleFilter::local_never_treated);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    CHECK(both[i] == (local[i] && never[i]));
    CHECK(never[i] == !panel.settlement(i).statutory_2011);
  }
  const auto keys = panel.group_keys("district_id");
  CHECK(keys[0] == rows[0].district_id);
  CHECK_THROWS_AS(panel.group_keys("village"), SpecError);
  CHECK(parse_sample_filter(to_string(SampleFilter::local_never_treated)) ==
        SampleFilter::local_never_treated);
}
