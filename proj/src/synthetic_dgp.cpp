#include "frontier_rd/synthetic_dgp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include "frontier_rd/diagnostics.hpp"
#include "frontier_rd/error.hpp"

namespace frontier_rd::dgp {

void DgpParams::validate() const {
  auto fail = [](const std::string& msg) { throw ParamError("dgp: " + msg); };
  if (n_settlements == 0) fail("n_settlements must be positive");
  if (n_districts < 2) fail("n_districts must be at least 2");
  if (n_states < 1 || n_states > n_districts) fail("n_states must be in [1, n_districts]");
  if (!(population_median > 0.0) || !(density_median > 0.0)) fail("medians must be positive");
  if (!(population_log_sd > 0.0) || !(density_log_sd > 0.0) || !(nonag_logit_sd > 0.0)) {
    fail("scale parameters must be positive");
  }
  if (!(compliance_jump >= 0.0 && compliance_jump <= 1.0)) fail("compliance_jump must be in [0,1]");
  if (!(cluster_rho >= 0.0 && cluster_rho < 1.0)) fail("cluster_rho must be in [0,1)");
  if (!(density_jump_at_cutoff >= 0.0)) fail("density_jump_at_cutoff must be nonnegative");
  if (!(manipulation_window > 0.0)) fail("manipulation_window must be positive");
  if (outcomes.empty()) fail("at least one outcome is required");
  for (const auto& o : outcomes) {
    if (o.name.empty()) fail("empty outcome name");
    if (!(o.noise_sd >= 0.0)) fail("outcome " + o.name + ": noise_sd must be nonnegative");
    if (!(o.missing_rate >= 0.0 && o.missing_rate < 1.0)) {
      fail("outcome " + o.name + ": missing_rate must be in [0,1)");
    }
  }
  try {
    design.validate();
  } catch (const ConfigError& e) {
    fail(e.what());
  }
  // Take-up is linear in r; with truncation the support is a box, so
  // checking its corners suffices.
  if (truncate_to_local) {
    const auto& c = design.cutoffs;
    const double hp = design.population_bandwidth / c.population;
    const double hd = design.density_bandwidth / c.density;
    const double hn = design.nonag_bandwidth / c.nonag_share;
    for (double sp : {-hp, hp}) {
      for (double sd : {-hd, hd}) {
        for (double sn : {-hn, hn}) {
          for (double z : {0.0, 1.0}) {
            const double p = baseline_takeup + takeup_slope_p * sp + takeup_slope_d * sd +
                             takeup_slope_n * sn + compliance_jump * z;
            if (p < 0.0 || p > 1.0) fail("infeasible take-up probability over the local support");
          }
        }
      }
    }
  }
}

const OutcomeTruth& DgpParams::outcome(const std::string& name) const {
  for (const auto& o : outcomes) {
    if (o.name == name) return o;
  }
  throw SpecError("dgp: unknown outcome '" + name + "'");
}

DgpParams DgpParams::from_config(const KeyValueConfig& cfg) {
  DgpParams p;
  const long long n = cfg.get_int("n_settlements", static_cast<long long>(p.n_settlements));
  if (n <= 0) throw ParamError("dgp: n_settlements must be positive");
  p.n_settlements = static_cast<std::size_t>(n);
  p.n_districts = static_cast<int>(cfg.get_int("n_districts", p.n_districts));
  p.n_states = static_cast<int>(cfg.get_int("n_states", p.n_states));
  p.population_median = cfg.get_double("population_median", p.population_median);
  p.population_log_sd = cfg.get_double("population_log_sd", p.population_log_sd);
  p.density_median = cfg.get_double("density_median", p.density_median);
  p.density_log_sd = cfg.get_double("density_log_sd", p.density_log_sd);
  p.nonag_logit_mean = cfg.get_double("nonag_logit_mean", p.nonag_logit_mean);
  p.nonag_logit_sd = cfg.get_double("nonag_logit_sd", p.nonag_logit_sd);
  p.truncate_to_local = cfg.get_bool("truncate_to_local", p.truncate_to_local);
  p.design = design::DesignConfig::from_config(cfg);
  p.compliance_jump = cfg.get_double("compliance_jump", p.compliance_jump);
  p.baseline_takeup = cfg.get_double("baseline_takeup", p.baseline_takeup);
  p.takeup_slope_p = cfg.get_double("takeup_slope_p", p.takeup_slope_p);
  p.takeup_slope_d = cfg.get_double("takeup_slope_d", p.takeup_slope_d);
  p.takeup_slope_n = cfg.get_double("takeup_slope_n", p.takeup_slope_n);
  p.endogeneity = cfg.get_double("endogeneity", p.endogeneity);
  p.cluster_rho = cfg.get_double("cluster_rho", p.cluster_rho);
  p.density_jump_at_cutoff = cfg.get_double("density_jump_at_cutoff", p.density_jump_at_cutoff);
  p.manipulation_window = cfg.get_double("manipulation_window", p.manipulation_window);
  p.round_outcomes = cfg.get_bool("round_outcomes", p.round_outcomes);
  p.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(p.seed)));

  if (const auto list = cfg.get("outcomes")) {
    p.outcomes.clear();
    std::stringstream ss(*list);
    std::string name;
    while (std::getline(ss, name, ',')) {
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      if (name.empty()) continue;
      OutcomeTruth o;
      o.name = name;
      p.outcomes.push_back(o);
    }
  }
  for (auto& o : p.outcomes) {
    const std::string k = "outcome." + o.name + ".";
    o.late = cfg.get_double(k + "late", o.late);
    o.direct_effect = cfg.get_double(k + "direct_effect", o.direct_effect);
    o.intercept = cfg.get_double(k + "intercept", o.intercept);
    o.slope_p = cfg.get_double(k + "slope_p", o.slope_p);
    o.slope_d = cfg.get_double(k + "slope_d", o.slope_d);
    o.slope_n = cfg.get_double(k + "slope_n", o.slope_n);
    o.noise_sd = cfg.get_double(k + "noise_sd", o.noise_sd);
    o.missing_rate = cfg.get_double(k + "missing_rate", o.missing_rate);
  }
  for (const auto& key : cfg.keys_with_prefix("outcome.")) {
    bool known = false;
    for (const auto& o : p.outcomes) known = known || key.rfind("outcome." + o.name + ".", 0) == 0;
    if (!known) throw ParamError("dgp: config key '" + key + "' names an undeclared outcome");
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::string padded(char prefix, long long value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*lld", prefix, width, value);
  return buf;
}

class Sampler {
 public:
  explicit Sampler(const DgpParams& p) : p_(p), rng_(p.seed) {}

  double normal() { return normal_(rng_); }
  double uniform() { return uniform_(rng_); }
  int district() {
    return static_cast<int>(std::uniform_int_distribution<int>(0, p_.n_districts - 1)(rng_));
  }

  // Accept/reject step implementing the density jump above a cutoff.
  bool keep_after_manipulation(double r) {
    const double j = p_.density_jump_at_cutoff;
    if (j == 1.0) return true;
    const bool in_window = r >= 0.0 && r < p_.manipulation_window;
    const double accept = j >= 1.0 ? (in_window ? 1.0 : 1.0 / j) : (in_window ? j : 1.0);
    return uniform() < accept;
  }

  std::int64_t population() {
    const auto& d = p_.design;
    for (;;) {
      const double raw = p_.population_median * std::exp(p_.population_log_sd * normal());
      const auto pop = std::max<std::int64_t>(1, std::llround(raw));
      const double v = static_cast<double>(pop);
      if (p_.truncate_to_local &&
          std::abs(v - d.cutoffs.population) > d.population_bandwidth) continue;
      if (!keep_after_manipulation(v / d.cutoffs.population - 1.0)) continue;
      return pop;
    }
  }

  double density() {
    const auto& d = p_.design;
    for (;;) {
      const double v = p_.density_median * std::exp(p_.density_log_sd * normal());
      if (p_.truncate_to_local && std::abs(v - d.cutoffs.density) > d.density_bandwidth) continue;
      if (!keep_after_manipulation(v / d.cutoffs.density - 1.0)) continue;
      return v;
    }
  }

  double nonag_share() {
    const auto& d = p_.design;
    for (;;) {
      const double v = logistic(p_.nonag_logit_mean + p_.nonag_logit_sd * normal());
      if (p_.truncate_to_local && std::abs(v - d.cutoffs.nonag_share) > d.nonag_bandwidth) continue;
      if (!keep_after_manipulation(v / d.cutoffs.nonag_share - 1.0)) continue;
      return v;
    }
  }

 private:
  const DgpParams& p_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace

data::Dataset generate(const DgpParams& params) {
  params.validate();
  Sampler rng(params);

  const std::size_t n_out = params.outcomes.size();
  // District random effects, one per (district, outcome).
  std::vector<double> district_effect(static_cast<std::size_t>(params.n_districts) * n_out);
  for (double& a : district_effect) a = rng.normal();

  std::vector<data::Settlement> rows;
  rows.reserve(params.n_settlements);
  const double rho = params.cluster_rho;
  for (std::size_t i = 0; i < params.n_settlements; ++i) {
    data::Settlement s;
    s.settlement_id = padded('S', static_cast<long long>(i + 1), 7);
    const int district = rng.district();
    s.district_id = padded('D', district + 1, 4);
    s.state_id = padded('T', district % params.n_states + 1, 2);

    s.population_2001 = rng.population();
    const double target_density = rng.density();
    s.area_2001 = static_cast<double>(s.population_2001) / target_density;
    s.density_2001 = data::compute_density(s.population_2001, s.area_2001);
    s.nonag_male_share_2001 = rng.nonag_share();
    s.literacy_rate_2001 = logistic(0.7 * rng.normal());
    s.main_worker_rate_2001 = logistic(-0.8 + 0.4 * rng.normal());
    s.sc_share_2001 = logistic(-1.6 + 0.9 * rng.normal());
    s.st_share_2001 = logistic(-2.2 + 1.2 * rng.normal());

    const auto r = design::normalize(s, params.design);
    const bool z = design::eligibility(s, params.design).z;
    s.ct_2001 = z;

    const double takeup = params.baseline_takeup + params.takeup_slope_p * r.r_p +
                          params.takeup_slope_d * r.r_d + params.takeup_slope_n * r.r_n +
                          params.compliance_jump * (z ? 1.0 : 0.0);
    if (takeup < 0.0 || takeup > 1.0) {
      throw ParamError("dgp: infeasible take-up probability " + std::to_string(takeup) +
                       " at settlement " + s.settlement_id);
    }
    s.statutory_2011 = rng.uniform() < takeup;
    const double st = s.statutory_2011 ? 1.0 : 0.0;

    for (std::size_t k = 0; k < n_out; ++k) {
      const auto& o = params.outcomes[k];
      const double a = district_effect[static_cast<std::size_t>(district) * n_out + k];
      const double e = rng.normal();
      double y = o.intercept + o.slope_p * r.r_p + o.slope_d * r.r_d + o.slope_n * r.r_n +
                 o.late * st + o.direct_effect * (z ? 1.0 : 0.0) +
                 o.noise_sd * (std::sqrt(rho) * a + std::sqrt(1.0 - rho) * e) +
                 params.endogeneity * (st - takeup);
      if (params.round_outcomes) y = std::max(0.0, std::round(y));
      const bool missing = rng.uniform() < o.missing_rate;
      s.outcomes.emplace(o.name, missing ? std::nullopt : std::optional<double>(y));
    }
    rows.push_back(std::move(s));
  }

  std::vector<std::string> names;
  for (const auto& o : params.outcomes) names.push_back(o.name);
  return data::Dataset::from_settlements(std::move(rows), std::move(names),
                                         "synthetic(seed=" + std::to_string(params.seed) + ")");
}

// ---------------------------------------------------------------------------
// Monte Carlo

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "tsls") return EstimatorKind::tsls;
  if (name == "ols") return EstimatorKind::ols;
  if (name == "direct" || name == "direct_effect") return EstimatorKind::direct_effect;
  throw ConfigError("estimator must be 'tsls', 'ols' or 'direct', got '" + std::string(name) + "'");
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::tsls: return "tsls";
    case EstimatorKind::ols: return "ols";
    case EstimatorKind::direct_effect: return "direct_effect";
  }
  return "tsls";
}

namespace {

ReplicationRecord run_one(const DgpParams& base, std::uint64_t seed, const EstimatorSpec& est,
                          double truth) {
  ReplicationRecord rec;
  rec.seed = seed;
  try {
    DgpParams p = base;
    p.seed = seed;
    auto dataset = std::make_shared<const data::Dataset>(generate(p));
    const design::Panel panel(dataset, p.design);

    const auto fs = diag::first_stage(panel, est.model, est.local);
    rec.f_stat = fs.f_stat;

    linreg::FitResult fit;
    std::string coef_name;
    switch (est.kind) {
      case EstimatorKind::tsls:
        fit = diag::main_effect(panel, est.model, est.outcome, est.local);
        coef_name = models::kTreatment;
        break;
      case EstimatorKind::ols:
        fit = linreg::ols(
            models::assemble(panel, models::naive_ols_spec(est.model, est.outcome, est.local)));
        coef_name = models::kTreatment;
        break;
      case EstimatorKind::direct_effect:
        fit = diag::direct_effect(panel, est.model, est.outcome, est.local);
        coef_name = models::kInstrument;
        break;
    }
    rec.estimate = fit.coef(coef_name);
    rec.se = fit.se(coef_name);
    const auto [lo, hi] = fit.conf_int(coef_name, est.level);
    rec.covered = lo <= truth && truth <= hi;
    rec.rejects_zero = fit.p_value(coef_name) < 1.0 - est.level;
    rec.n_obs = fit.n_obs;
    rec.n_clusters = fit.n_clusters;
    rec.ok = std::isfinite(rec.estimate) && std::isfinite(rec.se);
    if (!rec.ok) rec.error = "non-finite estimate";
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

MonteCarloSummary replicate(const DgpParams& params, int n_reps, const EstimatorSpec& est,
                            int threads) {
  if (n_reps < 1) throw ParamError("replicate: n_reps must be at least 1");
  params.validate();
  const OutcomeTruth& truth_spec = params.outcome(est.outcome);
  const double truth =
      est.kind == EstimatorKind::direct_effect ? truth_spec.direct_effect : truth_spec.late;

  MonteCarloSummary s;
  s.estimator = std::string(to_string(est.kind));
  s.outcome = est.outcome;
  s.truth = truth;
  s.n_reps = n_reps;
  s.records.resize(static_cast<std::size_t>(n_reps));

  const int workers = std::clamp(threads, 1, n_reps);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int i = next++; i < n_reps; i = next++) {
      s.records[static_cast<std::size_t>(i)] =
          run_one(params, params.seed + static_cast<std::uint64_t>(i), est, truth);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // Reductions in replication order.
  int ok = 0, covered = 0, rejected = 0, f10 = 0, f16 = 0;
  double sum = 0, sum_sq_err = 0, sum_se = 0, sum_f = 0, sum_n = 0, sum_g = 0;
  for (const auto& r : s.records) {
    if (!r.ok) continue;
    ++ok;
    sum += r.estimate;
    sum_sq_err += (r.estimate - truth) * (r.estimate - truth);
    sum_se += r.se;
    sum_f += r.f_stat;
    sum_n += r.n_obs;
    sum_g += r.n_clusters;
    covered += r.covered;
    rejected += r.rejects_zero;
    f10 += r.f_stat > 10.0;
    f16 += r.f_stat > diag::kStrongInstrumentF;
  }
  s.n_failed = n_reps - ok;
  s.failure_fraction = static_cast<double>(s.n_failed) / n_reps;
  if (ok > 0) {
    const double k = ok;
    s.mean_estimate = sum / k;
    s.bias = s.mean_estimate - truth;
    s.rmse = std::sqrt(sum_sq_err / k);
    double ss = 0.0;
    for (const auto& r : s.records) {
      if (r.ok) ss += (r.estimate - s.mean_estimate) * (r.estimate - s.mean_estimate);
    }
    s.sd_estimate = ok > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
    s.mc_se_of_mean = s.sd_estimate / std::sqrt(k);
    s.mean_se = sum_se / k;
    s.coverage = covered / k;
    s.rejection_rate = rejected / k;
    s.mean_f = sum_f / k;
    s.frac_f_above_10 = f10 / k;
    s.frac_f_above_16_38 = f16 / k;
    s.mean_n_obs = sum_n / k;
    s.mean_clusters = sum_g / k;
  }
  return s;
}

}  // namespace frontier_rd::dgp
