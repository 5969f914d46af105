#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "frontier_rd/csv.hpp"
#include "frontier_rd/error.hpp"
#include "frontier_rd/kv_config.hpp"

using namespace frontier_rd;

TEST_CASE("config parses keys, values and comments") {
  const auto cfg = KeyValueConfig::parse_string(
      "# header\n"
      "population_cutoff = 5000   # trailing\n"
      "\n"
      "  frontier_mode=hard\n"
      "name = two words\n");
  CHECK(cfg.get_double("population_cutoff", 0) == 5000);
  CHECK(cfg.get_string("frontier_mode", "") == "hard");
  CHECK(cfg.get_string("name", "") == "two words");
  CHECK(cfg.get_int("absent", 7) == 7);
  CHECK(cfg.contains("name"));
}

TEST_CASE("config rejects malformed and duplicate lines with line numbers") {
  try {
    KeyValueConfig::parse_string("a = 1\nno equals sign\n", "x.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("x.cfg:2") != std::string::npos);
  }
  try {
    KeyValueConfig::parse_string("a = 1\nb = 2\na = 3\n", "x.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("x.cfg:3") != std::string::npos);
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
  CHECK_THROWS_AS(KeyValueConfig::parse_string(" = 4\n"), ConfigError);
}

TEST_CASE("typed getters validate values") {
  const auto cfg = KeyValueConfig::parse_string("d = 1.5x\ni = 3.2\nb = maybe\nok = YES\n");
  CHECK_THROWS_AS(cfg.get_double("d", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("i", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_bool("b", false), ConfigError);
  CHECK(cfg.get_bool("ok", false));
  bool v = true;
  CHECK(parse_bool("off", v));
  CHECK_FALSE(v);
  CHECK_FALSE(parse_bool("2", v));
}

TEST_CASE("unconsumed keys are reported and serialization is sorted") {
  auto cfg = KeyValueConfig::parse_string("zeta = 1\nalpha = 2\nmid = 3\n");
  cfg.get_int("alpha", 0);
  cfg.mark_consumed("mid");
  const auto left = cfg.unconsumed();
  REQUIRE(left.size() == 1);
  CHECK(left[0] == "zeta");
  CHECK(cfg.serialize() == "alpha = 2\nmid = 3\nzeta = 1\n");
  cfg.set("alpha", "9");
  CHECK(cfg.get_int("alpha", 0) == 9);
  CHECK(cfg.keys_with_prefix("m") == std::vector<std::string>{"mid"});
}

TEST_CASE("csv reads quoted fields, CRLF and BOM") {
  std::istringstream in("\xEF\xBB\xBF" "a,b,c\r\n1,\"x, y\",\"he said \"\"hi\"\"\"\r\n\r\n2,,\"multi\nline\"\r\n");
  const auto t = csv::read(in, "t.csv");
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x, y");
  CHECK(t.rows[0][2] == "he said \"hi\"");
  CHECK(t.rows[1][1].empty());
  CHECK(t.rows[1][2] == "multi\nline");
  CHECK(t.line_numbers[0] == 2);
  CHECK(t.line_numbers[1] == 4);
}

TEST_CASE("csv field-count mismatch names the line") {
  std::istringstream in("a,b\n1,2\n3\n");
  try {
    csv::read(in, "bad.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.kind() == ErrorKind::usage);
  }
  std::istringstream unterminated("a,b\n1,\"open\n");
  CHECK_THROWS_AS(csv::read(unterminated, "u.csv"), ParseError);
}

TEST_CASE("csv escape and write round-trip") {
  std::ostringstream out;
  csv::write_row(out, {"plain", "with,comma", "with \"quote\"", ""});
  std::istringstream in("h1,h2,h3,h4\n" + out.str());
  const auto t = csv::read(in, "rt");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0] == std::vector<std::string>{"plain", "with,comma", "with \"quote\"", ""});
}

TEST_CASE("format_double is shortest round-trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::stod(csv::format_double(v)) == v);
  }
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(5000) == "5000");
}
