#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frontier_rd/kv_config.hpp"
#include "frontier_rd/models.hpp"
#include "frontier_rd/rd_design.hpp"
#include "frontier_rd/settlement_data.hpp"

namespace frontier_rd::dgp {

/// Planted truth for one outcome:
///   y = intercept + slopes·(r_p, r_d, r_n) + late·ST + direct_effect·Z
///       + noise_sd·(√ρ·a_district + √(1-ρ)·e) + endogeneity·(ST - p)
struct OutcomeTruth {
  std::string name = "y";
  double late = 2.0;
  double direct_effect = 0.0;
  double intercept = 10.0;
  double slope_p = 1.0;
  double slope_d = 0.5;
  double slope_n = 0.5;
  double noise_sd = 1.0;
  double missing_rate = 0.0;
};

struct DgpParams {
  std::size_t n_settlements = 37000;
  int n_districts = 500;
  int n_states = 20;  // districts are assigned to states round-robin

  // Population and density are lognormal, the non-ag share logit-normal.
  double population_median = 3500.0;
  double population_log_sd = 0.6;
  double density_median = 220.0;
  double density_log_sd = 0.8;
  double nonag_logit_mean = 0.6;
  double nonag_logit_sd = 0.5;
  bool truncate_to_local = false;  // redraw until inside the design's local window

  design::DesignConfig design;

  // Take-up: P(ST = 1) = baseline + slopes·r + compliance_jump·Z.
  double compliance_jump = 0.07;
  double baseline_takeup = 0.0027;
  double takeup_slope_p = 0.0;
  double takeup_slope_d = 0.0;
  double takeup_slope_n = 0.0;

  double endogeneity = 0.0;
  double cluster_rho = 0.2;  // share of outcome noise variance that is a district effect

  // Mass in [0, manipulation_window) above each cutoff (normalized scale)
  // is scaled by density_jump_at_cutoff.
  double density_jump_at_cutoff = 1.0;
  double manipulation_window = 0.2;

  bool round_outcomes = false;  // nonnegative integer counts
  std::vector<OutcomeTruth> outcomes{OutcomeTruth{}};
  std::uint64_t seed = 20240101;

  /// Throws ParamError.
  void validate() const;
  const OutcomeTruth& outcome(const std::string& name) const;

  /// Reads the generator keys plus the design keys. Outcomes come from
  /// `outcomes = a,b` and `outcome.<name>.<field>` entries.
  static DgpParams from_config(const KeyValueConfig& cfg);
};

/// Deterministic in the params (including seed). Throws ParamError when a
/// take-up probability leaves [0, 1].
data::Dataset generate(const DgpParams& params);

enum class EstimatorKind { tsls, ols, direct_effect };

EstimatorKind parse_estimator_kind(std::string_view name);
std::string_view to_string(EstimatorKind kind);

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::tsls;
  std::string outcome = "y";
  bool local = true;
  models::ModelOptions model;
  double level = 0.95;
};

struct ReplicationRecord {
  std::uint64_t seed = 0;
  bool ok = false;
  double estimate = 0.0;
  double se = 0.0;
  double f_stat = 0.0;
  bool covered = false;
  bool rejects_zero = false;
  int n_obs = 0;
  int n_clusters = 0;
  std::string error;
};

struct MonteCarloSummary {
  std::string estimator;
  std::string outcome;
  double truth = 0.0;
  int n_reps = 0;
  int n_failed = 0;
  double failure_fraction = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double sd_estimate = 0.0;
  double mc_se_of_mean = 0.0;
  double mean_se = 0.0;
  double coverage = 0.0;
  double rejection_rate = 0.0;  // H0: coefficient = 0 at 1 - level
  double mean_f = 0.0;
  double frac_f_above_10 = 0.0;
  double frac_f_above_16_38 = 0.0;
  double mean_n_obs = 0.0;
  double mean_clusters = 0.0;
  std::vector<ReplicationRecord> records;
};

/// Replication i uses seed = params.seed + i. Failures are recorded, not
/// thrown. The summary does not depend on `threads`.
MonteCarloSummary replicate(const DgpParams& params, int n_reps, const EstimatorSpec& estimator,
                            int threads = 1);

}  // namespace frontier_rd::dgp
