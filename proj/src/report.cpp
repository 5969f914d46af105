#include "frontier_rd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "frontier_rd/csv.hpp"
#include "frontier_rd/error.hpp"

namespace frontier_rd::report {

namespace {

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

double num(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nan("");
  return it->get<double>();
}

std::string with_commas(long long v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return v < 0 ? "-" + out : out;
}

std::string count(const Json& j, const char* key) {
  const double v = num(j, key);
  return std::isfinite(v) ? with_commas(std::llround(v)) : "-";
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "-";
  return fmt("%.*f", digits, v);
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string rule(std::size_t width, char c = '-') { return std::string(width, c) + "\n"; }

// Coefficient with stars over a parenthesized SE, as two cells.
std::pair<std::string, std::string> coef_cells(const Json& c, int digits) {
  const double p = num(c, "p_value");
  return {fixed(num(c, "estimate"), digits) + stars(p), "(" + fixed(num(c, "se"), digits) + ")"};
}

}  // namespace

std::string stars(double p) {
  if (!std::isfinite(p)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

// ---------------------------------------------------------------------------
// JSON builders

Json coefficient_json(const linreg::FitResult& fit, const std::string& name, double level) {
  const auto [lo, hi] = fit.conf_int(name, level);
  Json j;
  j["name"] = name;
  j["estimate"] = fit.coef(name);
  j["se"] = fit.se(name);
  j["t_stat"] = fit.t_stat(name);
  j["p_value"] = fit.p_value(name);
  j["ci_level"] = level;
  j["ci_low"] = lo;
  j["ci_high"] = hi;
  return j;
}

Json fit_json(const linreg::FitResult& fit) {
  Json j;
  j["estimator"] = fit.estimator == linreg::Estimator::tsls ? "tsls" : "ols";
  Json coefs = Json::array();
  for (const auto& n : fit.names) coefs.push_back(coefficient_json(fit, n));
  j["coefficients"] = std::move(coefs);
  j["n_obs"] = fit.n_obs;
  j["n_clusters"] = fit.n_clusters;
  j["n_fe_groups"] = fit.n_fe_groups;
  j["dof_model"] = fit.dof_model;
  j["dof_residual"] = fit.dof_residual;
  j["r2"] = fit.r2;
  j["adj_r2"] = fit.adj_r2;
  j["within_r2"] = fit.within_r2;
  j["small_sample_factor"] = fit.small_sample_factor;
  j["dropped_missing"] = fit.dropped_missing;
  j["dropped_singletons"] = fit.dropped_singletons;
  return j;
}

Json first_stage_json(const diag::FirstStageDiagnostics& fs) {
  Json j;
  j["instrument"] = coefficient_json(fs.fit, models::kInstrument);
  j["f_stat"] = fs.f_stat;
  j["partial_r2"] = fs.partial_r2;
  j["adj_r2"] = fs.adj_r2;
  j["n_obs"] = fs.n_obs;
  j["n_clusters"] = fs.n_clusters;
  j["n_fe_groups"] = fs.fit.n_fe_groups;
  j["dropped_missing"] = fs.fit.dropped_missing;
  j["dropped_singletons"] = fs.fit.dropped_singletons;
  return j;
}

Json density_json(const std::string& variable, const diag::DensityTestResult& r,
                  bool include_histogram) {
  Json j;
  j["variable"] = variable;
  j["cutoff"] = r.cutoff;
  j["log_density_jump"] = r.log_density_jump;
  j["se"] = r.se;
  j["t_stat"] = r.t_stat;
  j["p_value"] = r.p_value;
  j["bandwidth"] = r.bandwidth_used;
  j["bin_width"] = r.bin_width;
  j["density_left"] = r.density_left;
  j["density_right"] = r.density_right;
  j["n_left"] = r.n_left;
  j["n_right"] = r.n_right;
  j["variance"] = r.variance == diag::DensityVariance::jackknife ? "jackknife" : "analytic";
  j["warnings"] = r.warnings;
  if (include_histogram) {
    j["bin_midpoints"] = r.bin_midpoints;
    j["bin_heights"] = r.bin_heights;
  }
  return j;
}

Json balance_json(const std::vector<diag::BalanceRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["variable"] = r.variable;
    j["mean_control"] = r.mean_control;
    j["sd_control"] = r.sd_control;
    j["mean_treated"] = r.mean_treated;
    j["sd_treated"] = r.sd_treated;
    j["difference"] = r.mean_treated - r.mean_control;
    j["n"] = r.n;
    j["n_control"] = r.n_control;
    j["n_treated"] = r.n_treated;
    arr.push_back(std::move(j));
  }
  return arr;
}

Json exclusion_json(const std::vector<diag::ExclusionRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["outcome"] = r.outcome;
    j["main"] = {{"estimate", r.main_coef}, {"se", r.main_se}, {"p_value", r.main_p},
                 {"n_obs", r.main_n}};
    j["direct"] = {{"estimate", r.direct_coef}, {"se", r.direct_se}, {"p_value", r.direct_p},
                   {"n_obs", r.direct_n}};
    j["ratio"] = r.ratio;
    arr.push_back(std::move(j));
  }
  return arr;
}

Json crosstab_json(const data::CrossTab& t) {
  Json j;
  j["title"] = t.title;
  j["row_variable"] = t.row_variable;
  j["col_variable"] = t.col_variable;
  j["row_labels"] = t.row_labels;
  j["col_labels"] = t.col_labels;
  j["cells"] = Json::array({Json::array({t.cells[0][0], t.cells[0][1]}),
                            Json::array({t.cells[1][0], t.cells[1][1]})});
  j["total"] = t.total();
  return j;
}

Json monte_carlo_json(const dgp::MonteCarloSummary& s, bool include_records) {
  Json j;
  j["estimator"] = s.estimator;
  j["outcome"] = s.outcome;
  j["truth"] = s.truth;
  j["n_reps"] = s.n_reps;
  j["n_failed"] = s.n_failed;
  j["failure_fraction"] = s.failure_fraction;
  j["mean_estimate"] = s.mean_estimate;
  j["bias"] = s.bias;
  j["rmse"] = s.rmse;
  j["sd_estimate"] = s.sd_estimate;
  j["mc_se_of_mean"] = s.mc_se_of_mean;
  j["mean_se"] = s.mean_se;
  j["coverage"] = s.coverage;
  j["rejection_rate"] = s.rejection_rate;
  j["mean_f"] = s.mean_f;
  j["frac_f_above_10"] = s.frac_f_above_10;
  j["frac_f_above_16_38"] = s.frac_f_above_16_38;
  j["mean_n_obs"] = s.mean_n_obs;
  j["mean_clusters"] = s.mean_clusters;
  if (include_records) {
    Json recs = Json::array();
    for (const auto& r : s.records) {
      Json jr;
      jr["seed"] = r.seed;
      jr["ok"] = r.ok;
      jr["estimate"] = r.estimate;
      jr["se"] = r.se;
      jr["f_stat"] = r.f_stat;
      jr["covered"] = r.covered;
      jr["n_obs"] = r.n_obs;
      if (!r.ok) jr["error"] = r.error;
      recs.push_back(std::move(jr));
    }
    j["records"] = std::move(recs);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Text

namespace {

std::string render_crosstab(const Json& t) {
  std::ostringstream o;
  const auto& cells = t["cells"];
  const auto& rl = t["row_labels"];
  const auto& cl = t["col_labels"];
  const double total = num(t, "total");
  std::size_t w = 16;
  for (const auto& l : cl) w = std::max(w, l.get<std::string>().size() + 2);
  o << t["title"].get<std::string>() << "\n";
  o << pad_right(t["row_variable"].get<std::string>(), 18) << pad_left(cl[0].get<std::string>(), w)
    << pad_left(cl[1].get<std::string>(), w) << pad_left("Total", w) << "\n";
  auto cell = [&](double v) {
    const std::string share = total > 0 ? fmt(" (%.1f%%)", 100.0 * v / total) : "";
    return pad_left(with_commas(std::llround(v)) + share, w);
  };
  double col_sum[2] = {0, 0};
  for (int r = 0; r < 2; ++r) {
    const double a = cells[r][0].get<double>(), b = cells[r][1].get<double>();
    col_sum[0] += a;
    col_sum[1] += b;
    o << pad_right(rl[r].get<std::string>(), 18) << cell(a) << cell(b) << cell(a + b) << "\n";
  }
  o << pad_right("Total", 18) << cell(col_sum[0]) << cell(col_sum[1]) << cell(total) << "\n";
  return o.str();
}

}  // namespace

std::string render_ingest(const Json& j) {
  std::ostringstream o;
  o << "Ingest: " << j.value("source", std::string("?")) << "\n";
  o << "retained " << count(j, "rows_retained") << ", excluded " << count(j, "rows_excluded")
    << " (of " << count(j, "rows_ingested") << " rows)\n";
  if (j.contains("exclusion_reasons") && !j["exclusion_reasons"].empty()) {
    o << "Exclusions by reason:\n";
    for (const auto& [reason, n] : j["exclusion_reasons"].items()) {
      o << "  " << pad_left(with_commas(n.get<long long>()), 8) << "  " << reason << "\n";
    }
  }
  for (const auto& w : j.value("warnings", Json::array())) {
    o << "warning: " << w.get<std::string>() << "\n";
  }
  return o.str();
}

std::string render_design(const Json& j) {
  std::ostringstream o;
  o << "Design\n";
  o << "  settlements with defined running variables: " << count(j, "n_rows") << "\n";
  o << "  excluded from design:                       " << count(j, "n_excluded") << "\n";
  o << "  meeting all thresholds (z = 1):             " << count(j, "n_eligible") << "\n";
  o << "  in local window:                            " << count(j, "n_local") << "\n";
  if (j.contains("crosstabs")) {
    const auto& ct = j["crosstabs"];
    for (const char* k : {"population", "density", "nonag", "combined"}) {
      if (ct.contains("thresholds") && ct["thresholds"].contains(k)) {
        o << "\n" << render_crosstab(ct["thresholds"][k]);
      }
    }
    for (const char* k : {"all", "local"}) {
      if (ct.contains("treatment") && ct["treatment"].contains(k)) {
        o << "\n" << render_crosstab(ct["treatment"][k]);
      }
    }
  }
  return o.str();
}

std::string render_estimate(const Json& j) {
  std::ostringstream o;
  const std::size_t label_w = 34, col_w = 14;
  if (j.contains("first_stage")) {
    const auto& fs = j["first_stage"];
    const Json& g = fs.contains("global") ? fs["global"] : Json::object();
    const Json& l = fs.contains("local") ? fs["local"] : Json::object();
    o << "First stage: statutory status on threshold eligibility\n";
    o << rule(label_w + 2 * col_w);
    o << pad_right("", label_w) << pad_left("Global", col_w) << pad_left("Local", col_w) << "\n";
    o << rule(label_w + 2 * col_w);
    auto row = [&](const std::string& label, const std::string& a, const std::string& b) {
      o << pad_right(label, label_w) << pad_left(a, col_w) << pad_left(b, col_w) << "\n";
    };
    auto cells = [](const Json& side) {
      return side.contains("instrument") ? coef_cells(side["instrument"], 4)
                                         : std::pair<std::string, std::string>{"-", ""};
    };
    const auto [gc, gs] = cells(g);
    const auto [lc, ls] = cells(l);
    row("Eligibility (all thresholds met)", gc, lc);
    row("", gs, ls);
    row("First-stage F", fixed(num(g, "f_stat"), 2), fixed(num(l, "f_stat"), 2));
    row("Partial R2 of instrument", fixed(num(g, "partial_r2"), 4), fixed(num(l, "partial_r2"), 4));
    row("Adj. R2", fixed(num(g, "adj_r2"), 4), fixed(num(l, "adj_r2"), 4));
    row("Observations", count(g, "n_obs"), count(l, "n_obs"));
    row("Clusters", count(g, "n_clusters"), count(l, "n_clusters"));
    row("FE groups", count(g, "n_fe_groups"), count(l, "n_fe_groups"));
    o << rule(label_w + 2 * col_w);
    o << fmt("F reference values: %.2f (strong instrument), %.2f (15%% maximal bias)\n",
             diag::kStrongInstrumentF, diag::kMaxBias15F);
    if (g.contains("error")) o << "global: " << g["error"].get<std::string>() << "\n";
    if (l.contains("error")) o << "local: " << l["error"].get<std::string>() << "\n";
  }
  if (j.contains("outcomes") && !j["outcomes"].empty()) {
    const auto& outs = j["outcomes"];
    const std::size_t w = 16;
    o << "\n2SLS: effect of statutory status";
    o << " (" << j.value("sample", std::string("all")) << " sample)\n";
    o << rule(20 + w * outs.size());
    o << pad_right("", 20);
    for (const auto& r : outs) o << pad_left(r["outcome"].get<std::string>(), w);
    o << "\n" << rule(20 + w * outs.size());
    std::string coef_line = pad_right("Effect of ULB", 20), se_line = pad_right("", 20);
    std::string n_line = pad_right("Observations", 20), g_line = pad_right("Clusters", 20);
    for (const auto& r : outs) {
      if (r.contains("error")) {
        coef_line += pad_left("failed", w);
        se_line += pad_left("", w);
        n_line += pad_left("-", w);
        g_line += pad_left("-", w);
        continue;
      }
      const auto [c, s] = coef_cells(r["effect"], 3);
      coef_line += pad_left(c, w);
      se_line += pad_left(s, w);
      n_line += pad_left(count(r, "n_obs"), w);
      g_line += pad_left(count(r, "n_clusters"), w);
    }
    o << coef_line << "\n" << se_line << "\n" << rule(20 + w * outs.size());
    o << n_line << "\n" << g_line << "\n" << rule(20 + w * outs.size());
    const auto& m = j.value("model", Json::object());
    o << "FE: " << m.value("fixed_effect", std::string("-"))
      << ", clusters: " << m.value("cluster", std::string("-")) << "\n";
    for (const auto& r : outs) {
      if (r.contains("error")) {
        o << r["outcome"].get<std::string>() << ": " << r["error"].get<std::string>() << "\n";
      }
    }
    o << "*** p<0.01, ** p<0.05, * p<0.1\n";
  }
  return o.str();
}

std::string render_diagnose(const Json& j) {
  std::ostringstream o;
  if (j.contains("mccrary")) {
    o << "Density tests at the thresholds\n";
    o << rule(78);
    o << pad_right("Running variable", 18) << pad_left("log jump", 10) << pad_left("se", 10)
      << pad_left("t", 9) << pad_left("p", 9) << pad_left("h", 10) << pad_left("N left", 9)
      << pad_left("N right", 9) << "\n";
    o << rule(78);
    for (const auto& r : j["mccrary"]) {
      o << pad_right(r["variable"].get<std::string>(), 18);
      if (r.contains("error")) {
        o << "  " << r["error"].get<std::string>() << "\n";
        continue;
      }
      o << pad_left(fixed(num(r, "log_density_jump"), 3), 10) << pad_left(fixed(num(r, "se"), 3), 10)
        << pad_left(fixed(num(r, "t_stat"), 3), 9) << pad_left(fixed(num(r, "p_value"), 3), 9)
        << pad_left(fixed(num(r, "bandwidth"), 3), 10) << pad_left(count(r, "n_left"), 9)
        << pad_left(count(r, "n_right"), 9) << "\n";
      for (const auto& w : r.value("warnings", Json::array())) {
        o << "  warning: " << w.get<std::string>() << "\n";
      }
    }
    o << rule(78);
  }
  if (j.contains("balance")) {
    o << "\nBalance by " << j.value("balance_group", std::string("ct_2001")) << "\n";
    o << rule(80);
    o << pad_right("Variable", 26) << pad_left("Mean (0)", 11) << pad_left("SD (0)", 10)
      << pad_left("Mean (1)", 11) << pad_left("SD (1)", 10) << pad_left("N (0)", 6)
      << pad_left("N (1)", 6) << "\n";
    o << rule(80);
    for (const auto& r : j["balance"]) {
      o << pad_right(r["variable"].get<std::string>(), 26)
        << pad_left(fixed(num(r, "mean_control"), 3), 11) << pad_left(fixed(num(r, "sd_control"), 3), 10)
        << pad_left(fixed(num(r, "mean_treated"), 3), 11) << pad_left(fixed(num(r, "sd_treated"), 3), 10)
        << pad_left(count(r, "n_control"), 6) << pad_left(count(r, "n_treated"), 6) << "\n";
    }
    o << rule(80);
  }
  if (j.contains("exclusion") && !j["exclusion"].empty()) {
    o << "\nMain effect vs direct effect of eligibility among never-statutory\n";
    o << rule(78);
    o << pad_right("Outcome", 24) << pad_left("Main", 14) << pad_left("Direct", 14)
      << pad_left("|ratio|", 10) << pad_left("N main", 8) << pad_left("N dir", 8) << "\n";
    o << rule(78);
    for (const auto& r : j["exclusion"]) {
      o << pad_right(r["outcome"].get<std::string>(), 24);
      if (r.contains("error")) {
        o << "  " << r["error"].get<std::string>() << "\n";
        continue;
      }
      const auto& m = r["main"];
      const auto& d = r["direct"];
      o << pad_left(fixed(num(m, "estimate"), 3) + stars(num(m, "p_value")), 14)
        << pad_left(fixed(num(d, "estimate"), 3) + stars(num(d, "p_value")), 14)
        << pad_left(fixed(num(r, "ratio"), 3), 10) << pad_left(count(m, "n_obs"), 8)
        << pad_left(count(d, "n_obs"), 8) << "\n";
      o << pad_right("", 24) << pad_left("(" + fixed(num(m, "se"), 3) + ")", 14)
        << pad_left("(" + fixed(num(d, "se"), 3) + ")", 14) << "\n";
    }
    o << rule(78);
  }
  if (j.contains("figures")) {
    o << "\nBinned-scatter data:";
    for (const auto& f : j["figures"]) o << " " << f["file"].get<std::string>();
    o << "\n";
  }
  return o.str();
}

std::string render_simulate(const Json& j) {
  std::ostringstream o;
  const auto& s = j["summary"];
  o << "Monte Carlo: " << s.value("estimator", std::string("?")) << " on "
    << s.value("outcome", std::string("?")) << ", " << count(s, "n_reps") << " replications, base seed "
    << j.value("seed", 0ull) << "\n";
  o << rule(48);
  auto line = [&](const char* label, const std::string& v) {
    o << pad_right(label, 30) << pad_left(v, 18) << "\n";
  };
  line("truth", fixed(num(s, "truth"), 4));
  line("mean estimate", fixed(num(s, "mean_estimate"), 4));
  line("bias", fixed(num(s, "bias"), 4));
  line("MC s.e. of mean", fixed(num(s, "mc_se_of_mean"), 4));
  line("RMSE", fixed(num(s, "rmse"), 4));
  line("sd of estimates", fixed(num(s, "sd_estimate"), 4));
  line("mean reported s.e.", fixed(num(s, "mean_se"), 4));
  line("95% CI coverage", fixed(num(s, "coverage"), 3));
  line("rejection rate (H0: 0)", fixed(num(s, "rejection_rate"), 3));
  line("mean first-stage F", fixed(num(s, "mean_f"), 2));
  line("  matched-scale reference F", fixed(num(j, "reference_f"), 2));
  line("share F > 10", fixed(num(s, "frac_f_above_10"), 3));
  line("share F > 16.38", fixed(num(s, "frac_f_above_16_38"), 3));
  line("mean observations", fixed(num(s, "mean_n_obs"), 1));
  line("mean clusters", fixed(num(s, "mean_clusters"), 1));
  line("failed replications", count(s, "n_failed"));
  o << rule(48);
  return o.str();
}

std::string render(const Json& j) {
  const std::string cmd = j.value("command", std::string());
  if (cmd == "ingest") return render_ingest(j);
  if (cmd == "design") return render_design(j);
  if (cmd == "estimate") return render_estimate(j);
  if (cmd == "diagnose") return render_diagnose(j);
  if (cmd == "simulate") return render_simulate(j);
  throw InputError("cannot render results of unknown command '" + cmd + "'");
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return csv::format_double(v.get<double>());
  return v.dump();
}

void table(std::ostream& out, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows) {
  csv::write_row(out, header);
  for (const auto& r : rows) csv::write_row(out, r);
}

}  // namespace

void write_csv(const Json& j, std::ostream& out) {
  const std::string cmd = j.value("command", std::string());
  std::vector<std::vector<std::string>> rows;
  if (cmd == "estimate") {
    for (const auto& [side, fs] : j["first_stage"].items()) {
      if (fs.contains("error")) continue;
      const auto& c = fs["instrument"];
      rows.push_back({"first_stage_" + side, "statutory_2011", cell(c["estimate"]), cell(c["se"]),
                      cell(c["p_value"]), cell(fs["n_obs"]), cell(fs["f_stat"])});
    }
    for (const auto& r : j["outcomes"]) {
      if (r.contains("error")) continue;
      const auto& c = r["effect"];
      rows.push_back({"tsls", cell(r["outcome"]), cell(c["estimate"]), cell(c["se"]),
                      cell(c["p_value"]), cell(r["n_obs"]), ""});
    }
    table(out, {"table", "outcome", "estimate", "se", "p_value", "n_obs", "first_stage_f"}, rows);
  } else if (cmd == "diagnose") {
    for (const auto& r : j["mccrary"]) {
      if (r.contains("error")) continue;
      rows.push_back({cell(r["variable"]), cell(r["log_density_jump"]), cell(r["se"]),
                      cell(r["t_stat"]), cell(r["p_value"]), cell(r["bandwidth"]),
                      cell(r["n_left"]), cell(r["n_right"])});
    }
    table(out, {"variable", "log_density_jump", "se", "t_stat", "p_value", "bandwidth", "n_left",
                "n_right"},
          rows);
  } else if (cmd == "simulate") {
    std::vector<std::string> header, row;
    for (const auto& [k, v] : j["summary"].items()) {
      if (k == "records") continue;
      header.push_back(k);
      row.push_back(cell(v));
    }
    table(out, header, {row});
  } else if (cmd == "ingest" || cmd == "design") {
    std::vector<std::string> header, row;
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured()) continue;
      header.push_back(k);
      row.push_back(cell(v));
    }
    table(out, header, {row});
  } else {
    throw InputError("no CSV view for command '" + cmd + "'");
  }
}

void write_binned_csv(const diag::BinnedSeries& s, std::ostream& out) {
  csv::write_row(out, {"side", "bin_lo", "bin_hi", "x_mean", "y_mean", "n", "fitted"});
  for (std::size_t b = 0; b < s.bin_means.size(); ++b) {
    const double lo = s.bin_edges[b], hi = s.bin_edges[b + 1];
    const bool right = lo >= 0.0;
    const auto& fit = right ? s.fitted_right : s.fitted_left;
    csv::write_row(out, {right ? "right" : "left", csv::format_double(lo), csv::format_double(hi),
                         csv::format_double(s.bin_centers[b]), csv::format_double(s.bin_means[b]),
                         std::to_string(s.bin_counts[b]),
                         fit ? csv::format_double((*fit)(s.bin_centers[b])) : ""});
  }
}

}  // namespace frontier_rd::report
