#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "../support/fixtures.hpp"
#include "frontier_rd/cli.hpp"

namespace fs = std::filesystem;
using frontier_rd::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("frontier_rd_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("ingest of the toy panel keeps every row") {
  TempDir t;
  const auto in = t.write("toy.csv", fixtures::toy_csv());
  const auto r = call({"--out-dir", t.path.string(), "ingest", "--input", in.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("retained 3, excluded 0") != std::string::npos);
  CHECK(fs::exists(t.path / "dataset.csv"));
  const auto j = nlohmann::json::parse(slurp(t.path / "ingest.json"));
  CHECK(j["rows_retained"] == 3);
}

TEST_CASE("usage errors exit with status 2 and name the problem") {
  TempDir t;
  std::string csv = fixtures::toy_csv();
  const auto bad = t.write("bad.csv", csv.replace(csv.find("population_2001"), 15, "pop"));
  auto r = call({"--out-dir", t.path.string(), "ingest", "--input", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("population_2001") != std::string::npos);

  const auto good = t.write("toy.csv", fixtures::toy_csv());
  REQUIRE(call({"--out-dir", t.path.string(), "ingest", "--input", good.string()}).code == 0);
  const auto ds = (t.path / "dataset.csv").string();
  r = call({"--out-dir", t.path.string(), "estimate", "--dataset", ds, "--outcomes", "nope"});
  CHECK(r.code == 2);
  CHECK(r.err.find("nope") != std::string::npos);

  const auto cfg = t.write("bad.cfg", "tau = 0.05\nbogus_key = 1\n");
  r = call({"--config", cfg.string(), "--out-dir", t.path.string(), "ingest", "--input", good.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("bogus_key") != std::string::npos);

  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"--fe", "village", "report"}).code == 2);
  CHECK(call({"ingest"}).code == 2);
}

TEST_CASE("manifest records one entry per command with hashes") {
  TempDir t;
  const auto in = t.write("toy.csv", fixtures::toy_csv());
  const auto dir = t.path.string();
  REQUIRE(call({"--out-dir", dir, "ingest", "--input", in.string()}).code == 0);
  REQUIRE(call({"--out-dir", dir, "ingest", "--input", in.string()}).code == 0);
  REQUIRE(call({"--out-dir", dir, "design", "--dataset", (t.path / "dataset.csv").string()}).code == 0);
  const auto m = nlohmann::json::parse(slurp(t.path / "manifest.json"));
  REQUIRE(m["runs"].size() == 2);
  CHECK(m["runs"][0]["command"] == "ingest");
  CHECK(m["runs"][1]["command"] == "design");
  CHECK(m["version"] == frontier_rd::cli::kVersion);
  CHECK(m["runs"][0]["inputs"][0]["sha256"] == frontier_rd::cli::sha256_file(in));
  for (const auto& o : m["runs"][1]["outputs"]) {
    CHECK(o["sha256"] == frontier_rd::cli::sha256_file(t.path / o["file"].get<std::string>()));
  }
  CHECK(frontier_rd::cli::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("simulate output is byte-identical for the same seed") {
  TempDir a, b;
  const std::string cfg_text =
      "n_settlements = 1500\nn_districts = 30\nn_states = 3\ncompliance_jump = 0.4\n"
      "baseline_takeup = 0.05\n";
  const auto cfg = a.write("sim.cfg", cfg_text);
  for (const auto* dir : {&a, &b}) {
    const auto r = call({"--config", cfg.string(), "--seed", "17", "--threads", "1", "--out-dir",
                         dir->path.string(), "simulate", "--reps", "4", "--records"});
    REQUIRE(r.code == 0);
  }
  CHECK(slurp(a.path / "simulate.json") == slurp(b.path / "simulate.json"));
  CHECK(slurp(a.path / "simulate.txt") == slurp(b.path / "simulate.txt"));
  const auto j = nlohmann::json::parse(slurp(a.path / "simulate.json"));
  CHECK(j["summary"]["n_reps"] == 4);

  const auto rep = call({"--out-dir", a.path.string(), "report"});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("Monte Carlo") != std::string::npos);
}

TEST_CASE("report without saved results points at the out dir") {
  TempDir t;
  const auto r = call({"--out-dir", (t.path / "empty").string(), "report"});
  CHECK(r.code == 2);
  CHECK(r.err.find("no results") != std::string::npos);
}

namespace {

nlohmann::json run_json(const TempDir& t, std::vector<std::string> args, const std::string& file) {
  std::vector<std::string> full{"--out-dir", t.path.string()};
  full.insert(full.end(), args.begin(), args.end());
  const auto r = call(full);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  return nlohmann::json::parse(slurp(t.path / file));
}

}  // namespace

TEST_CASE("estimate recovers a planted effect and honours sample and FE flags") {
  TempDir t;
  const auto panel = std::string(FRONTIER_RD_DATA_DIR) + "/synthetic_panel.csv";
  REQUIRE(call({"--out-dir", t.path.string(), "ingest", "--input", panel}).code == 0);
  const auto ds = (t.path / "dataset.csv").string();
  const auto all = run_json(t, {"estimate", "--dataset", ds, "--outcomes", "hospitals"}, "estimate.json");
  const auto& eff = all["outcomes"][0]["effect"];
  CHECK(std::abs(eff["estimate"].get<double>() - 2.0) < 3.0 * eff["se"].get<double>());
  const auto local = run_json(t, {"--local", "estimate", "--dataset", ds, "--outcomes", "hospitals"},
                              "estimate.json");
  CHECK(local["sample"] == "local");
  CHECK(local["outcomes"][0]["n_obs"] < all["outcomes"][0]["n_obs"]);
  const auto state = run_json(t, {"--fe", "state", "estimate", "--dataset", ds}, "estimate.json");
  CHECK(state["model"]["fixed_effect"] == "state");
  CHECK(state["first_stage"]["global"]["n_fe_groups"] == 12);
  CHECK(state["outcomes"].size() == 3);
}

// Uniform running variables around every cutoff. With `bunching`, the
// population mass just above 5000 is doubled.
std::string uniform_panel_csv(std::uint64_t seed, bool bunching) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pop(1000, 9000), dens(100, 700), share(0.5, 1.0), u(0, 1);
  std::ostringstream out;
  out << fixtures::kToyHeader;
  for (int i = 0; i < 20000; ++i) {
    double p = pop(rng);
    if (bunching && p >= 4000 && p < 5000 && u(rng) < 0.5) p += 1000;
    const double d = dens(rng), nonag = share(rng);
    const bool eligible = p >= 5000 && d >= 400 && nonag >= 0.75;
    out << "U" << i << ",S1,D" << i % 50 << ',' << std::llround(p) << ',' << std::llround(p) / d << ','
        << nonag << ',' << u(rng) << ',' << u(rng) << ',' << 0.5 * u(rng) << ',' << 0.5 * u(rng) << ',' << (u(rng) < (eligible ? 0.5 : 0.05)) << ',' << i % 7 << '\n';
  }
  return out.str();
}

TEST_CASE("diagnose flags manipulation only when it is planted") {
  TempDir clean, bunched;
  for (const auto* t : {&clean, &bunched}) {
    const auto in = t->write("u.csv", uniform_panel_csv(5, t == &bunched));
    REQUIRE(call({"--out-dir", t->path.string(), "ingest", "--input", in.string()}).code == 0);
  }
  auto j = run_json(clean, {"diagnose", "--dataset", (clean.path / "dataset.csv").string()}, "diagnose.json");
  REQUIRE(j["mccrary"].size() == 3);
  for (const auto& m : j["mccrary"]) CHECK(m["p_value"].get<double>() > 0.1);
  CHECK(fs::exists(clean.path / "figure2_frontier.csv"));
  CHECK(fs::exists(clean.path / "density_population.csv"));

  j = run_json(bunched, {"diagnose", "--dataset", (bunched.path / "dataset.csv").string()}, "diagnose.json");
  double min_p = 1.0;
  for (const auto& m : j["mccrary"]) min_p = std::min(min_p, m["p_value"].get<double>());
  CHECK(min_p < 0.05);
}

TEST_CASE("simulate: sharp design coverage and invalid config") {
  TempDir t;
  const auto cfg = t.write("sharp.cfg",
                           "n_settlements = 1500\nn_districts = 30\nn_states = 3\ncompliance_jump = 1\n"
                           "baseline_takeup = 0\npopulation_median = 5000\ndensity_median = 400\n"
                           "nonag_logit_mean = 1.1\n");
  const auto j = run_json(t, {"--config", cfg.string(), "simulate", "--reps", "100"}, "simulate.json");
  const double coverage = j["summary"]["coverage"].get<double>();
  CHECK(coverage >= 0.90);
  CHECK(coverage <= 0.99);
  CHECK(j["reference_f"] == 18.05);

  const auto bad = t.write("bad.cfg", "cluster_rho = 1.5\n");
  CHECK(call({"--config", bad.string(), "--out-dir", t.path.string(), "simulate"}).code == 2);
}
