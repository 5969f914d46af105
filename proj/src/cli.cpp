#include "frontier_rd/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "frontier_rd/csv.hpp"
#include "frontier_rd/diagnostics.hpp"
#include "frontier_rd/error.hpp"
#include "frontier_rd/kv_config.hpp"
#include "frontier_rd/models.hpp"
#include "frontier_rd/rd_design.hpp"
#include "frontier_rd/report.hpp"
#include "frontier_rd/settlement_data.hpp"
#include "frontier_rd/synthetic_dgp.hpp"

namespace fs = std::filesystem;

namespace frontier_rd::cli {

using report::Json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw InputError("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

namespace {

enum class Format { text, json, csv };

// Keys read by the CLI itself, on top of the design, model and DGP keys.
constexpr const char* kCliKeys[] = {"threads", "local", "reps", "estimator", "outcome",
                                    "bins", "fit_degree", "density_variance"};

struct Context {
  std::string command;
  std::string command_line;
  KeyValueConfig cfg;
  std::optional<fs::path> config_path;
  fs::path out_dir;
  Format format = Format::text;
  int threads = 1;
  bool local = false;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::vector<std::string> outputs;                          // relative to out_dir
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_output(Context& ctx, const std::string& name, const std::string& content) {
  const fs::path path = ctx.out_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw InputError("write failed for '" + path.string() + "'");
  if (std::find(ctx.outputs.begin(), ctx.outputs.end(), name) == ctx.outputs.end()) {
    ctx.outputs.push_back(name);
  }
}

void record_input(Context& ctx, const fs::path& path) {
  ctx.inputs.emplace_back(path.string(), sha256_file(path.string()));
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One manifest per output directory; a rerun of a command replaces its entry.
void write_manifest(Context& ctx) {
  const fs::path path = ctx.out_dir / "manifest.json";
  Json manifest;
  if (fs::exists(path)) {
    try {
      manifest = Json::parse(read_file(path));
    } catch (const Json::parse_error&) {
      manifest = Json();
    }
  }
  if (!manifest.is_object() || !manifest.contains("runs") || !manifest["runs"].is_array()) {
    manifest = Json::object();
    manifest["runs"] = Json::array();
  }
  manifest["tool"] = "frontier-rd";
  manifest["version"] = kVersion;

  Json run;
  run["command"] = ctx.command;
  run["command_line"] = ctx.command_line;
  run["timestamp"] = utc_timestamp();
  Json config;
  config["file"] = ctx.config_path ? Json(ctx.config_path->string()) : Json(nullptr);
  config["file_sha256"] =
      ctx.config_path ? Json(sha256_file(ctx.config_path->string())) : Json(nullptr);
  config["effective_sha256"] = sha256_hex(ctx.cfg.serialize());
  run["config"] = std::move(config);
  Json inputs = Json::array();
  for (const auto& [p, h] : ctx.inputs) inputs.push_back({{"path", p}, {"sha256", h}});
  run["inputs"] = std::move(inputs);
  Json outputs = Json::array();
  for (const auto& name : ctx.outputs) {
    outputs.push_back({{"file", name}, {"sha256", sha256_file((ctx.out_dir / name).string())}});
  }
  run["outputs"] = std::move(outputs);

  Json runs = Json::array();
  for (auto& r : manifest["runs"]) {
    if (r.value("command", std::string()) != ctx.command) runs.push_back(r);
  }
  runs.push_back(std::move(run));
  manifest["runs"] = std::move(runs);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << manifest.dump(2) << "\n";
}

Json config_json(const KeyValueConfig& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

// Reads every key the tool knows about so that leftovers are typos. Invalid
// values in any section are reported here, before work starts.
void check_config_keys(const KeyValueConfig& cfg) {
  design::DesignConfig::from_config(cfg);
  models::ModelOptions::from_config(cfg);
  dgp::DgpParams::from_config(cfg);
  for (const char* k : kCliKeys) cfg.mark_consumed(k);
  const auto left = cfg.unconsumed();
  if (!left.empty()) {
    std::string msg = "unknown config key";
    msg += left.size() > 1 ? "s: " : ": ";
    for (std::size_t i = 0; i < left.size(); ++i) msg += (i ? ", " : "") + left[i];
    throw ConfigError(msg);
  }
}

std::string emit(const Context& ctx, const Json& j) {
  switch (ctx.format) {
    case Format::json: return j.dump(2) + "\n";
    case Format::csv: {
      std::ostringstream o;
      report::write_csv(j, o);
      return o.str();
    }
    case Format::text: break;
  }
  return report::render(j);
}

void save_result(Context& ctx, const Json& j) {
  write_output(ctx, ctx.command + ".json", j.dump(2) + "\n");
  write_output(ctx, ctx.command + ".txt", report::render(j));
}

std::shared_ptr<const data::Dataset> load_dataset(Context& ctx, const fs::path& path,
                                                  const std::string& schema_path) {
  data::Schema schema = data::Schema::identity();
  if (!schema_path.empty()) {
    schema = data::Schema::load(schema_path);
    record_input(ctx, schema_path);
  }
  auto d = std::make_shared<const data::Dataset>(data::ingest_csv(path, schema));
  record_input(ctx, path);
  return d;
}

std::vector<std::string> resolve_outcomes(const Context& ctx, const data::Dataset& d,
                                          const std::string& flag) {
  std::vector<std::string> names;
  if (!flag.empty()) {
    names = split_list(flag);
  } else if (const auto v = ctx.cfg.get("outcomes")) {
    names = split_list(*v);
  } else {
    names = d.outcome_names();
  }
  for (const auto& n : names) {
    if (!d.has_outcome(n)) throw SpecError("unknown outcome '" + n + "'");
  }
  return names;
}

std::string sample_name(bool local) { return local ? "local" : "all"; }

Json model_json(const models::ModelOptions& m) {
  Json j;
  j["fixed_effect"] = std::string(models::to_string(m.fixed_effect));
  j["cluster"] = std::string(models::to_string(m.cluster));
  j["running_poly_degree"] = m.running_poly_degree;
  j["control_indicators"] = m.control_indicators;
  j["controls"] = models::default_controls(m);
  return j;
}

// ---------------------------------------------------------------------------
// Commands

struct IngestArgs {
  std::string input;
  std::string schema;
};

int cmd_ingest(Context& ctx, const IngestArgs& a, std::ostream& out) {
  const auto d = load_dataset(ctx, a.input, a.schema);
  {
    std::ostringstream snap, excl;
    data::write_snapshot(*d, snap);
    data::write_exclusion_log(*d, excl);
    write_output(ctx, "dataset.csv", snap.str());
    write_output(ctx, "exclusions.csv", excl.str());
  }
  Json j;
  j["command"] = "ingest";
  j["source"] = fs::path(a.input).filename().string();
  j["rows_ingested"] = d->provenance().rows_ingested;
  j["rows_retained"] = d->provenance().rows_retained;
  j["rows_excluded"] = d->provenance().rows_excluded;
  std::map<std::string, std::size_t> reasons;
  for (const auto& e : d->exclusion_log()) ++reasons[e.reason];
  j["exclusion_reasons"] = reasons;
  j["outcomes"] = d->outcome_names();
  j["warnings"] = d->warnings();
  save_result(ctx, j);
  out << emit(ctx, j);
  return 0;
}

struct DatasetArgs {
  std::string dataset;
  std::string schema;
  std::string outcomes;
};

int cmd_design(Context& ctx, const DatasetArgs& a, std::ostream& out) {
  const auto d = load_dataset(ctx, a.dataset, a.schema);
  const auto cfg = design::DesignConfig::from_config(ctx.cfg);
  const design::Design des = design::build_design(*d, cfg);
  {
    std::ostringstream o;
    design::write_design_csv(des, o);
    write_output(ctx, "designed.csv", o.str());
  }
  std::size_t n_z = 0, n_local = 0, n_p = 0, n_d = 0, n_n = 0;
  for (const auto& r : des.rows) {
    n_z += r.z;
    n_local += r.in_local_sample;
    n_p += r.z_p;
    n_d += r.z_d;
    n_n += r.z_n;
  }
  Json j;
  j["command"] = "design";
  j["config"] = config_json(cfg.to_config());
  j["n_rows"] = des.rows.size();
  j["n_excluded"] = des.exclusions.size();
  j["n_eligible"] = n_z;
  j["n_local"] = n_local;
  j["eligible_by_threshold"] = {{"population", n_p}, {"density", n_d}, {"nonag", n_n}};
  const auto th = data::crosstab_thresholds(*d, cfg.cutoffs);
  Json ct;
  ct["thresholds"] = {{"population", report::crosstab_json(th.population)},
                      {"density", report::crosstab_json(th.density)},
                      {"nonag", report::crosstab_json(th.nonag)},
                      {"combined", report::crosstab_json(th.combined)}};
  auto all_tab = data::crosstab_treatment(*d);
  all_tab.title = "CT status in 2001 by statutory status in 2011: all settlements";
  auto local_tab = data::crosstab_treatment(
      *d, [&](const data::Settlement& s) { return design::local_filter(s, cfg); });
  local_tab.title = "CT status in 2001 by statutory status in 2011: local window";
  ct["treatment"] = {{"all", report::crosstab_json(all_tab)},
                     {"local", report::crosstab_json(local_tab)}};
  j["crosstabs"] = std::move(ct);
  save_result(ctx, j);
  out << emit(ctx, j);
  return 0;
}

int cmd_estimate(Context& ctx, const DatasetArgs& a, std::ostream& out, std::ostream& err) {
  const auto d = load_dataset(ctx, a.dataset, a.schema);
  const auto outcomes = resolve_outcomes(ctx, *d, a.outcomes);
  const auto dcfg = design::DesignConfig::from_config(ctx.cfg);
  const auto model = models::ModelOptions::from_config(ctx.cfg);
  const design::Panel panel(d, dcfg);

  int failures = 0;
  Json j;
  j["command"] = "estimate";
  j["sample"] = sample_name(ctx.local);
  j["model"] = model_json(model);
  Json fs_json;
  for (const bool local : {false, true}) {
    const char* side = local ? "local" : "global";
    try {
      fs_json[side] = report::first_stage_json(diag::first_stage(panel, model, local));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::usage) throw;
      ++failures;
      fs_json[side] = {{"error", e.what()}};
      err << "first stage (" << side << "): " << e.what() << "\n";
    }
  }
  j["first_stage"] = std::move(fs_json);
  j["weak_iv_reference"] = {{"strong_instrument_f", diag::kStrongInstrumentF},
                            {"max_bias_15_f", diag::kMaxBias15F}};
  Json rows = Json::array();
  for (const auto& name : outcomes) {
    Json r;
    r["outcome"] = name;
    try {
      const auto fit = diag::main_effect(panel, model, name, ctx.local);
      r["effect"] = report::coefficient_json(fit, models::kTreatment);
      r["n_obs"] = fit.n_obs;
      r["n_clusters"] = fit.n_clusters;
      r["dropped_missing"] = fit.dropped_missing;
      r["dropped_singletons"] = fit.dropped_singletons;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::usage) throw;
      ++failures;
      r["error"] = e.what();
      err << "outcome " << name << ": " << e.what() << "\n";
    }
    rows.push_back(std::move(r));
  }
  j["outcomes"] = std::move(rows);
  save_result(ctx, j);
  out << emit(ctx, j);
  return failures ? 1 : 0;
}

struct DiagnoseArgs : DatasetArgs {
  int bins = 20;
  int fit_degree = 1;
  std::string variance;
};

std::vector<double> masked(const std::vector<double>& v, const std::vector<bool>& mask) {
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i] && std::isfinite(v[i])) out.push_back(v[i]);
  }
  return out;
}

int cmd_diagnose(Context& ctx, const DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
  const auto d = load_dataset(ctx, a.dataset, a.schema);
  const auto outcomes = resolve_outcomes(ctx, *d, a.outcomes);
  const auto dcfg = design::DesignConfig::from_config(ctx.cfg);
  const auto model = models::ModelOptions::from_config(ctx.cfg);
  const design::Panel panel(d, dcfg);
  const auto sample = panel.sample_mask(ctx.local ? design::SampleFilter::local
                                                  : design::SampleFilter::all);

  diag::DensityTestOptions dopt;
  const std::string variance = a.variance.empty()
                                   ? ctx.cfg.get_string("density_variance", "analytic")
                                   : a.variance;
  if (variance == "jackknife") {
    dopt.variance = diag::DensityVariance::jackknife;
  } else if (variance != "analytic") {
    throw ConfigError("density_variance must be 'analytic' or 'jackknife', got '" + variance + "'");
  }
  const int bins = a.bins > 0 ? a.bins : static_cast<int>(ctx.cfg.get_int("bins", 20));
  const int degree = a.fit_degree >= -1 ? a.fit_degree
                                        : static_cast<int>(ctx.cfg.get_int("fit_degree", 1));

  int failures = 0;
  auto fail = [&](const std::string& what, const Error& e) {
    if (e.kind() == ErrorKind::usage) throw;
    ++failures;
    err << what << ": " << e.what() << "\n";
  };

  Json j;
  j["command"] = "diagnose";
  j["sample"] = sample_name(ctx.local);

  const std::pair<const char*, const char*> running[] = {
      {"r_p", "population"}, {"r_d", "density"}, {"r_n", "nonag"}};
  Json mc = Json::array();
  for (const auto& [col, label] : running) {
    const auto x = masked(panel.column(col), sample);
    try {
      const auto r = diag::mccrary_test(x, 0.0, dopt);
      mc.push_back(report::density_json(col, r));
      std::ostringstream o;
      csv::write_row(o, {"bin_midpoint", "height"});
      for (std::size_t b = 0; b < r.bin_midpoints.size(); ++b) {
        csv::write_row(o, {csv::format_double(r.bin_midpoints[b]),
                           csv::format_double(r.bin_heights[b])});
      }
      write_output(ctx, std::string("density_") + label + ".csv", o.str());
    } catch (const Error& e) {
      fail(std::string("density test ") + col, e);
      mc.push_back({{"variable", col}, {"error", e.what()}});
    }
  }
  j["mccrary"] = std::move(mc);

  j["balance_group"] = "ct_2001";
  try {
    j["balance"] = report::balance_json(
        diag::balance_table(panel, diag::default_balance_variables(), "ct_2001", ctx.local));
  } catch (const Error& e) {
    fail("balance", e);
    j["balance"] = Json::array();
    j["balance_error"] = e.what();
  }

  Json ex = Json::array();
  for (const auto& name : outcomes) {
    try {
      ex.push_back(report::exclusion_json(diag::exclusion_check(panel, model, {name}, ctx.local))[0]);
    } catch (const Error& e) {
      fail("exclusion check " + name, e);
      ex.push_back({{"outcome", name}, {"error", e.what()}});
    }
  }
  j["exclusion"] = std::move(ex);

  // Binned first-stage plots, within 100% of each cutoff.
  const auto treat = panel.column(models::kTreatment);
  Json figs = Json::array();
  auto figure = [&](const std::string& file, const std::vector<double>& xcol) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < xcol.size(); ++i) {
      if (sample[i] && std::isfinite(xcol[i]) && std::abs(xcol[i]) <= 1.0) {
        x.push_back(xcol[i]);
        y.push_back(treat[i]);
      }
    }
    try {
      const auto s = diag::binned_scatter(x, y, bins, degree);
      std::ostringstream o;
      report::write_binned_csv(s, o);
      write_output(ctx, file, o.str());
      figs.push_back({{"file", file}, {"n", x.size()}, {"bins", s.bin_means.size()}});
    } catch (const Error& e) {
      fail("binned scatter " + file, e);
      figs.push_back({{"file", file}, {"error", e.what()}});
    }
  };
  for (const auto& [col, label] : running) {
    figure(std::string("figure1_") + label + ".csv", panel.column(col));
  }
  figure("figure2_frontier.csv", panel.column("frontier"));
  j["figures"] = std::move(figs);
  j["binned_scatter"] = {{"bins_per_side", bins}, {"fit_degree", degree}};

  save_result(ctx, j);
  out << emit(ctx, j);
  return failures ? 1 : 0;
}

struct SimulateArgs {
  int reps = 0;
  std::string estimator;
  std::string outcome;
  std::string write_panel;
  bool records = false;
};

int cmd_simulate(Context& ctx, const SimulateArgs& a, std::ostream& out) {
  const auto params = dgp::DgpParams::from_config(ctx.cfg);
  const long long reps = a.reps > 0 ? a.reps : ctx.cfg.get_int("reps", 100);
  if (reps < 1 || reps > 1000000) throw ConfigError("reps must be in [1, 1000000]");
  dgp::EstimatorSpec est;
  est.kind = dgp::parse_estimator_kind(
      a.estimator.empty() ? ctx.cfg.get_string("estimator", "tsls") : a.estimator);
  est.outcome = a.outcome.empty() ? ctx.cfg.get_string("outcome", params.outcomes.front().name)
                                  : a.outcome;
  params.outcome(est.outcome);
  est.local = ctx.local;
  est.model = models::ModelOptions::from_config(ctx.cfg);

  if (!a.write_panel.empty()) {
    const auto panel = dgp::generate(params);
    std::ostringstream o;
    data::write_snapshot(panel, o);
    write_output(ctx, a.write_panel, o.str());
  }

  const auto summary = dgp::replicate(params, static_cast<int>(reps), est, ctx.threads);
  Json j;
  j["command"] = "simulate";
  j["seed"] = params.seed;
  j["sample"] = sample_name(ctx.local);
  j["config"] = config_json(ctx.cfg);
  j["summary"] = report::monte_carlo_json(summary, a.records);
  j["reference_f"] = report::kMatchedScaleReferenceF;
  save_result(ctx, j);
  out << emit(ctx, j);
  return summary.n_failed == summary.n_reps ? 1 : 0;
}

int cmd_report(Context& ctx, std::ostream& out) {
  std::string text;
  for (const char* c : {"ingest", "design", "estimate", "diagnose", "simulate"}) {
    const fs::path p = ctx.out_dir / (std::string(c) + ".json");
    if (!fs::exists(p)) continue;
    Json j;
    try {
      j = Json::parse(read_file(p));
    } catch (const Json::parse_error& e) {
      throw InputError("cannot parse '" + p.string() + "': " + e.what());
    }
    record_input(ctx, p);
    if (!text.empty()) text += "\n";
    text += report::render(j);
  }
  if (text.empty()) {
    throw ConfigError("no results to report in '" + ctx.out_dir.string() + "'");
  }
  write_output(ctx, "report.txt", text);
  out << text;
  return 0;
}

std::string quote_arg(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t\"'") == std::string::npos) return s;
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

int resolve_threads(const std::optional<int>& flag, const KeyValueConfig& cfg) {
  long long n = 0;
  if (flag) {
    n = *flag;
  } else if (cfg.contains("threads")) {
    n = cfg.get_int("threads", 1);
  } else if (const char* env = std::getenv("FRONTIER_RD_THREADS"); env && *env) {
    try {
      n = std::stoll(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("FRONTIER_RD_THREADS must be an integer, got '") + env + "'");
    }
  } else {
    n = std::max(1u, std::thread::hardware_concurrency());
  }
  if (n < 1 || n > 1024) throw ConfigError("thread count must be in [1, 1024]");
  return static_cast<int>(n);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-threshold fuzzy RD estimation over census-town thresholds", "frontier-rd"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "frontier_rd_out", format = "text", fe, cluster;
  std::optional<long long> seed;
  std::optional<int> threads;
  std::optional<double> tau;
  bool local = false;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--threads", threads, "worker threads (default: FRONTIER_RD_THREADS, then all cores)");
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  auto* local_flag = app.add_flag("--local", local, "restrict to the local window around the cutoffs");
  app.add_option("--fe", fe, "fixed effects: district, state or none")
      ->check(CLI::IsMember({"district", "state", "none"}));
  app.add_option("--cluster", cluster, "cluster level: district or state")
      ->check(CLI::IsMember({"district", "state"}));
  app.add_option("--tau", tau, "soft-min temperature");
  app.add_option("--format", format, "stdout format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "validate a settlement CSV and write a snapshot");
  ingest->add_option("--input", ingest_args.input, "settlement CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--schema", ingest_args.schema, "column mapping file")->check(CLI::ExistingFile);

  DatasetArgs design_args, estimate_args;
  auto* design_cmd = app.add_subcommand("design", "compute running variables, eligibility and cross-tabs");
  design_cmd->add_option("--dataset", design_args.dataset, "dataset CSV")->required()->check(CLI::ExistingFile);
  design_cmd->add_option("--schema", design_args.schema, "column mapping file")->check(CLI::ExistingFile);

  auto* estimate = app.add_subcommand("estimate", "first stage and 2SLS outcome tables");
  estimate->add_option("--dataset", estimate_args.dataset, "dataset CSV")->required()->check(CLI::ExistingFile);
  estimate->add_option("--schema", estimate_args.schema, "column mapping file")->check(CLI::ExistingFile);
  estimate->add_option("--outcomes", estimate_args.outcomes, "comma-separated outcome names");

  DiagnoseArgs diag_args;
  diag_args.bins = 0;
  diag_args.fit_degree = -2;
  auto* diagnose = app.add_subcommand("diagnose", "density tests, balance, exclusion check, plot data");
  diagnose->add_option("--dataset", diag_args.dataset, "dataset CSV")->required()->check(CLI::ExistingFile);
  diagnose->add_option("--schema", diag_args.schema, "column mapping file")->check(CLI::ExistingFile);
  diagnose->add_option("--outcomes", diag_args.outcomes, "comma-separated outcome names");
  diagnose->add_option("--bins", diag_args.bins, "binned-scatter bins per side (default 20)")
      ->check(CLI::Range(2, 10000));
  diagnose->add_option("--fit-degree", diag_args.fit_degree, "side-wise polynomial degree, -1 for none (default 1)")
      ->check(CLI::Range(-1, 6));
  diagnose->add_option("--variance", diag_args.variance, "density test variance")
      ->check(CLI::IsMember({"analytic", "jackknife"}));

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo on the synthetic design");
  simulate->add_option("--reps", sim_args.reps, "replications (default 100)")->check(CLI::PositiveNumber);
  simulate->add_option("--estimator", sim_args.estimator, "tsls, ols or direct")
      ->check(CLI::IsMember({"tsls", "ols", "direct", "direct_effect"}));
  simulate->add_option("--outcome", sim_args.outcome, "outcome to estimate");
  simulate->add_option("--write-panel", sim_args.write_panel, "also write the base-seed panel to this file in --out-dir");
  simulate->add_flag("--records", sim_args.records, "include per-replication records in the JSON");

  auto* report_cmd = app.add_subcommand("report", "render saved results in --out-dir as text");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.command_line = "frontier-rd";
  for (const auto& a : args) ctx.command_line += " " + quote_arg(a);
  ctx.format = format == "json" ? Format::json : format == "csv" ? Format::csv : Format::text;
  ctx.out_dir = out_dir;

  try {
    if (!config_path.empty()) {
      ctx.cfg = KeyValueConfig::load(config_path);
      ctx.config_path = config_path;
    }
    // Flags override the file.
    if (seed) ctx.cfg.set("seed", std::to_string(*seed));
    if (tau) ctx.cfg.set("softmin_temperature", csv::format_double(*tau));
    if (!fe.empty()) ctx.cfg.set("fixed_effect", fe);
    if (!cluster.empty()) ctx.cfg.set("cluster", cluster);
    if (local_flag->count() > 0) ctx.cfg.set("local", local ? "true" : "false");
    if (threads) ctx.cfg.set("threads", std::to_string(*threads));
    check_config_keys(ctx.cfg);
    ctx.local = ctx.cfg.get_bool("local", false);
    ctx.threads = resolve_threads(threads, ctx.cfg);

    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());

    int code = 0;
    if (*ingest) {
      code = cmd_ingest(ctx, ingest_args, out);
    } else if (*design_cmd) {
      code = cmd_design(ctx, design_args, out);
    } else if (*estimate) {
      code = cmd_estimate(ctx, estimate_args, out, err);
    } else if (*diagnose) {
      code = cmd_diagnose(ctx, diag_args, out, err);
    } else if (*simulate) {
      code = cmd_simulate(ctx, sim_args, out);
    } else if (*report_cmd) {
      code = cmd_report(ctx, out);
    }
    write_manifest(ctx);
    return code;
  } catch (const Error& e) {
    err << "frontier-rd " << ctx.command << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::usage ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    err << "frontier-rd " << ctx.command << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace frontier_rd::cli
