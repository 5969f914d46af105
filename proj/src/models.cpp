#include "frontier_rd/models.hpp"

#include <cmath>

#include "frontier_rd/error.hpp"

namespace frontier_rd::models {

void RegressionSpec::validate() const {
  if (outcome.empty()) throw SpecError("regression spec: outcome is empty");
  if (endogenous && !instrument) {
    throw SpecError("regression spec: endogenous variable '" + *endogenous +
                    "' needs an instrument");
  }
  if (fixed_effect && *fixed_effect != "district_id" && *fixed_effect != "state_id") {
    throw SpecError("regression spec: unknown fixed-effect key '" + *fixed_effect + "'");
  }
  if (cluster != "district_id" && cluster != "state_id") {
    throw SpecError("regression spec: unknown cluster key '" + cluster + "'");
  }
}

linreg::Problem assemble(const design::Panel& panel, const RegressionSpec& spec) {
  spec.validate();
  const std::vector<bool> in_sample = panel.sample_mask(spec.sample);

  const std::vector<double> y = panel.column(spec.outcome);
  std::vector<double> d, z;
  if (spec.endogenous) d = panel.column(*spec.endogenous);
  if (spec.instrument) z = panel.column(*spec.instrument);
  std::vector<std::vector<double>> x;
  x.reserve(spec.controls.size());
  for (const auto& c : spec.controls) x.push_back(panel.column(c));
  const auto cluster_keys = panel.group_keys(spec.cluster);
  std::vector<std::string> fe_keys;
  if (spec.fixed_effect) fe_keys = panel.group_keys(*spec.fixed_effect);

  std::vector<bool> keep(panel.size(), false);
  linreg::Problem p;
  for (std::size_t i = 0; i < panel.size(); ++i) {
    if (!in_sample[i]) continue;
    bool ok = std::isfinite(y[i]);
    if (spec.endogenous) ok = ok && std::isfinite(d[i]);
    if (spec.instrument) ok = ok && std::isfinite(z[i]);
    for (const auto& col : x) ok = ok && std::isfinite(col[i]);
    if (ok) {
      keep[i] = true;
    } else {
      ++p.dropped_missing;
    }
  }
  const auto n = static_cast<Eigen::Index>(std::count(keep.begin(), keep.end(), true));

  p.outcome_name = spec.outcome;
  p.endogenous_name = spec.endogenous;
  p.instrument_name = spec.instrument;
  p.control_names = spec.controls;
  p.outcome.resize(n);
  if (spec.endogenous) p.endogenous.resize(n);
  if (spec.instrument) p.instrument.resize(n);
  p.controls.resize(n, static_cast<Eigen::Index>(x.size()));
  std::vector<std::string> kept_clusters, kept_fe;
  kept_clusters.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0, r = 0; i < panel.size(); ++i) {
    if (!keep[i]) continue;
    const auto row = static_cast<Eigen::Index>(r++);
    p.outcome(row) = y[i];
    if (spec.endogenous) p.endogenous(row) = d[i];
    if (spec.instrument) p.instrument(row) = z[i];
    for (std::size_t j = 0; j < x.size(); ++j) p.controls(row, static_cast<Eigen::Index>(j)) = x[j][i];
    kept_clusters.push_back(cluster_keys[i]);
    if (spec.fixed_effect) kept_fe.push_back(fe_keys[i]);
  }
  p.cluster = linreg::GroupIndex::from_keys(kept_clusters);
  if (spec.fixed_effect) p.fixed_effect = linreg::GroupIndex::from_keys(kept_fe);
  return p;
}

GroupLevel parse_group_level(std::string_view name) {
  if (name == "none") return GroupLevel::none;
  if (name == "district") return GroupLevel::district;
  if (name == "state") return GroupLevel::state;
  throw ConfigError("group level must be 'none', 'district' or 'state', got '" + std::string(name) +
                    "'");
}

std::string_view to_string(GroupLevel level) {
  switch (level) {
    case GroupLevel::none: return "none";
    case GroupLevel::district: return "district";
    case GroupLevel::state: return "state";
  }
  return "none";
}

std::optional<std::string> group_field(GroupLevel level) {
  switch (level) {
    case GroupLevel::none: return std::nullopt;
    case GroupLevel::district: return "district_id";
    case GroupLevel::state: return "state_id";
  }
  return std::nullopt;
}

ModelOptions ModelOptions::from_config(const KeyValueConfig& cfg) {
  ModelOptions o;
  o.fixed_effect = parse_group_level(cfg.get_string("fixed_effect", "district"));
  o.cluster = parse_group_level(cfg.get_string("cluster", "district"));
  if (o.cluster == GroupLevel::none) throw ConfigError("cluster level cannot be 'none'");
  o.running_poly_degree = static_cast<int>(cfg.get_int("running_poly_degree", 1));
  if (o.running_poly_degree < 0 || o.running_poly_degree > 4) {
    throw ConfigError("running_poly_degree must be between 0 and 4");
  }
  o.control_indicators = cfg.get_bool("control_indicators", false);
  return o;
}

std::vector<std::string> default_controls(const ModelOptions& opts) {
  std::vector<std::string> c;
  for (int k = 1; k <= opts.running_poly_degree; ++k) {
    const std::string suffix = k == 1 ? "" : "^" + std::to_string(k);
    for (const char* r : {"r_p", "r_d", "r_n"}) c.push_back(r + suffix);
  }
  if (opts.control_indicators) {
    for (const char* z : {"z_p", "z_d", "z_n"}) c.emplace_back(z);
  }
  for (const char* f : {"literacy_rate_2001", "sc_share_2001", "st_share_2001"}) c.emplace_back(f);
  return c;
}

namespace {

RegressionSpec base_spec(const ModelOptions& opts, bool local) {
  RegressionSpec s;
  s.controls = default_controls(opts);
  s.fixed_effect = group_field(opts.fixed_effect);
  const auto cl = group_field(opts.cluster);
  if (!cl) throw ConfigError("cluster level cannot be 'none'");
  s.cluster = *cl;
  s.sample = local ? design::SampleFilter::local : design::SampleFilter::all;
  return s;
}

}  // namespace

RegressionSpec first_stage_spec(const ModelOptions& opts, bool local) {
  RegressionSpec s = base_spec(opts, local);
  s.outcome = kTreatment;
  s.instrument = kInstrument;
  return s;
}

RegressionSpec reduced_form_spec(const ModelOptions& opts, const std::string& outcome, bool local) {
  RegressionSpec s = base_spec(opts, local);
  s.outcome = outcome;
  s.instrument = kInstrument;
  return s;
}

RegressionSpec main_effect_spec(const ModelOptions& opts, const std::string& outcome, bool local) {
  RegressionSpec s = base_spec(opts, local);
  s.outcome = outcome;
  s.endogenous = kTreatment;
  s.instrument = kInstrument;
  return s;
}

RegressionSpec naive_ols_spec(const ModelOptions& opts, const std::string& outcome, bool local) {
  RegressionSpec s = base_spec(opts, local);
  s.outcome = outcome;
  s.controls.insert(s.controls.begin(), kTreatment);
  return s;
}

RegressionSpec direct_effect_spec(const ModelOptions& opts, const std::string& outcome, bool local) {
  RegressionSpec s = base_spec(opts, local);
  s.outcome = outcome;
  s.instrument = kInstrument;
  s.sample = local ? design::SampleFilter::local_never_treated : design::SampleFilter::never_treated;
  return s;
}

}  // namespace frontier_rd::models
