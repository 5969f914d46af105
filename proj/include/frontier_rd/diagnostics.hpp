#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frontier_rd/linreg.hpp"
#include "frontier_rd/models.hpp"
#include "frontier_rd/rd_design.hpp"

namespace frontier_rd::diag {

// Weak-instrument reference values for a single instrument: the
// conventional strong-instrument threshold and the 15% maximal-bias
// critical value. Reported next to F, never enforced.
inline constexpr double kStrongInstrumentF = 16.38;
inline constexpr double kMaxBias15F = 8.96;

struct FirstStageDiagnostics {
  double coef = 0.0;
  double se = 0.0;
  double f_stat = 0.0;  // (coef / se)^2
  double partial_r2 = 0.0;
  double adj_r2 = 0.0;
  int n_obs = 0;
  int n_clusters = 0;
  linreg::FitResult fit;
};

FirstStageDiagnostics first_stage(const design::Panel& panel, const models::ModelOptions& opts,
                                  bool local);

/// 2SLS of an outcome on statutory status instrumented by eligibility. The
/// one code path behind `estimate` and the main column of exclusion_check.
linreg::FitResult main_effect(const design::Panel& panel, const models::ModelOptions& opts,
                              const std::string& outcome, bool local);
/// OLS of an outcome on eligibility among never-statutory settlements.
linreg::FitResult direct_effect(const design::Panel& panel, const models::ModelOptions& opts,
                                const std::string& outcome, bool local);

enum class DensityVariance { analytic, jackknife };

struct DensityTestOptions {
  std::optional<double> bin_width;  // default 2·sd·n^(-1/2)
  std::optional<double> bandwidth;  // default: rule-of-thumb from a quartic pilot
  DensityVariance variance = DensityVariance::analytic;
};

inline constexpr std::size_t kDensityMinPerSide = 200;

struct DensityTestResult {
  double cutoff = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;  // 2·(1 - Φ(|t|))
  double bandwidth_used = 0.0;
  double bin_width = 0.0;
  std::size_t n_left = 0;   // observations below the cutoff
  std::size_t n_right = 0;  // at or above
  double log_density_jump = 0.0;
  double se = 0.0;
  double density_left = 0.0;   // boundary density estimates
  double density_right = 0.0;
  DensityVariance variance = DensityVariance::analytic;
  std::vector<double> bin_midpoints;
  std::vector<double> bin_heights;  // normalized histogram
  std::vector<std::string> warnings;
};

/// Density-discontinuity (manipulation) test: a fine histogram, then
/// triangular-kernel local linear smoothing of the bin heights on each side
/// of the cutoff; the statistic is the log ratio of the two boundary
/// estimates over its standard error. Throws DegenerateSupportError when one
/// side is empty or has too little data for the bandwidth.
DensityTestResult mccrary_test(std::span<const double> running, double cutoff,
                               const DensityTestOptions& options = {});

struct BalanceRow {
  std::string variable;
  double mean_control = 0.0;
  double sd_control = 0.0;
  double mean_treated = 0.0;
  double sd_treated = 0.0;
  std::size_t n = 0;
  std::size_t n_control = 0;
  std::size_t n_treated = 0;
};

/// log_population, log_density, the non-ag share, literacy, main workers,
/// SC and ST shares.
std::vector<std::string> default_balance_variables();

/// Per-variable means and sample SDs by a 0/1 group column (default CT
/// status). Throws SpecError on an unknown variable.
std::vector<BalanceRow> balance_table(const design::Panel& panel,
                                      const std::vector<std::string>& variables,
                                      const std::string& group = "ct_2001", bool local = false);

struct ExclusionRow {
  std::string outcome;
  double main_coef = 0.0;
  double main_se = 0.0;
  double main_p = 1.0;
  int main_n = 0;
  double direct_coef = 0.0;
  double direct_se = 0.0;
  double direct_p = 1.0;
  int direct_n = 0;
  double ratio = 0.0;  // |direct / main|
};

std::vector<ExclusionRow> exclusion_check(const design::Panel& panel,
                                          const models::ModelOptions& opts,
                                          const std::vector<std::string>& outcomes,
                                          bool local = true);

struct PolynomialFit {
  std::vector<double> coefficients;  // ascending powers
  double operator()(double x) const;
};

struct BinnedSeries {
  std::vector<double> bin_edges;    // strictly increasing, 0 is always an edge
  std::vector<double> bin_centers;  // mean x per bin
  std::vector<double> bin_means;
  std::vector<std::size_t> bin_counts;
  std::optional<PolynomialFit> fitted_left;
  std::optional<PolynomialFit> fitted_right;
};

/// Equal-count bins built separately below and at-or-above 0 (n_bins per
/// side, tied x values never split). With fit_degree >= 0, side-wise
/// polynomial least-squares fits on the raw points.
BinnedSeries binned_scatter(std::span<const double> x, std::span<const double> y, int n_bins,
                            int fit_degree = -1);

}  // namespace frontier_rd::diag
