#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace frontier_rd::linreg {

/// Dense factorization of group keys. Ids follow sorted key order, so they
/// (and every reduction ordered by them) do not depend on row order.
class GroupIndex {
 public:
  GroupIndex() = default;
  /// Throws InputError on an empty key.
  static GroupIndex from_keys(std::span<const std::string> keys);
  /// Arbitrary integer codes, re-densified in increasing code order.
  static GroupIndex from_codes(std::span<const long long> codes);

  const std::vector<int>& ids() const { return ids_; }
  int id(std::size_t row) const { return ids_[row]; }
  std::size_t size() const { return ids_.size(); }
  int n_groups() const { return n_groups_; }

  /// Restriction to the rows where `keep` is true, re-densified.
  GroupIndex subset(const std::vector<bool>& keep) const;

 private:
  std::vector<int> ids_;
  int n_groups_ = 0;
};

struct WithinResult {
  Eigen::MatrixXd values;
  std::vector<bool> singleton;  // row belongs to a one-observation group (its row is all zero)
  int n_groups = 0;
  int n_singleton_groups = 0;
};

/// Subtracts group means from every column.
WithinResult within_transform(const Eigen::MatrixXd& values, const GroupIndex& groups);

/// Numeric regression problem (the "design matrix bundle"). NaN entries mark
/// missing values; such rows are dropped listwise.
struct Problem {
  std::string outcome_name = "y";
  Eigen::VectorXd outcome;

  std::optional<std::string> endogenous_name;
  Eigen::VectorXd endogenous;
  std::optional<std::string> instrument_name;
  Eigen::VectorXd instrument;

  std::vector<std::string> control_names;
  Eigen::MatrixXd controls;  // rows x controls, may have zero columns

  std::optional<GroupIndex> fixed_effect;  // absent: an intercept is estimated
  GroupIndex cluster;

  int dropped_missing = 0;  // rows discarded before the problem was assembled
};

enum class Estimator { ols, tsls };

struct FitResult {
  Estimator estimator = Estimator::ols;
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd vcov;  // cluster-robust, small-sample corrected

  int n_obs = 0;
  int n_clusters = 0;
  int n_fe_groups = 0;   // absorbed groups (0 without fixed effects)
  int dof_model = 0;     // regressors + absorbed groups (+ intercept)
  int dof_residual = 0;  // n_obs - dof_model
  double r2 = 0.0;        // 1 - SSR/SST with SST around the overall mean
  double adj_r2 = 0.0;
  double within_r2 = 0.0;  // on demeaned data (equals r2 without fixed effects)
  double ssr = 0.0;
  double sst = 0.0;
  double small_sample_factor = 1.0;  // G/(G-1) * (N-1)/(N-K)
  int dropped_missing = 0;
  int dropped_singletons = 0;

  std::size_t index(std::string_view name) const;  // throws SpecError
  double coef(std::string_view name) const;
  double se(std::string_view name) const;
  double t_stat(std::string_view name) const;
  /// Two-sided, Student t with n_clusters - 1 degrees of freedom.
  double p_value(std::string_view name) const;
  std::pair<double, double> conf_int(std::string_view name, double level = 0.95) const;
  double critical_value(double level = 0.95) const;
};

inline constexpr double kRankTolerance = 1e-10;
inline constexpr double kDegenerateInstrumentTolerance = 1e-10;

/// Least squares of the outcome on [endogenous, instrument, controls] (those
/// present), absorbing the fixed effect by demeaning. Throws RankError naming
/// collinear columns, InferenceError with fewer than two clusters or no
/// residual degrees of freedom.
FitResult ols(const Problem& p);

/// Just-identified 2SLS: endogenous instrumented by instrument, controls
/// exogenous. Throws DegenerateInstrumentError when the partialled-out
/// instrument is uncorrelated with the endogenous regressor.
FitResult tsls(const Problem& p);

/// Squared partial correlation of the instrument with the treatment after
/// partialling controls and fixed effects from both. The treatment is the
/// endogenous regressor when present, otherwise the outcome.
double partial_r2(const Problem& p);

}  // namespace frontier_rd::linreg
