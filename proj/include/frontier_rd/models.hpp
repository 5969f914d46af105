#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frontier_rd/kv_config.hpp"
#include "frontier_rd/linreg.hpp"
#include "frontier_rd/rd_design.hpp"

namespace frontier_rd::models {

/// Named regression over a Panel. Field names resolve through
/// design::Panel::column.
struct RegressionSpec {
  std::string outcome;
  std::optional<std::string> endogenous;
  std::optional<std::string> instrument;
  std::vector<std::string> controls;
  std::optional<std::string> fixed_effect = "district_id";  // empty: intercept only
  std::string cluster = "district_id";
  design::SampleFilter sample = design::SampleFilter::all;

  /// Endogenous requires an instrument (just-identified only).
  void validate() const;
};

/// Resolves names, applies the sample filter and drops rows with a missing
/// value in any used column (counted in Problem::dropped_missing).
linreg::Problem assemble(const design::Panel& panel, const RegressionSpec& spec);

enum class GroupLevel { none, district, state };

GroupLevel parse_group_level(std::string_view name);
std::string_view to_string(GroupLevel level);
/// Panel group key field for a level; empty for GroupLevel::none.
std::optional<std::string> group_field(GroupLevel level);

struct ModelOptions {
  GroupLevel fixed_effect = GroupLevel::district;
  GroupLevel cluster = GroupLevel::district;
  int running_poly_degree = 1;      // powers of r_p, r_d, r_n entering the controls
  bool control_indicators = false;  // add z_p, z_d, z_n as controls

  /// Keys: `fixed_effect`, `cluster`, `running_poly_degree`, `control_indicators`.
  static ModelOptions from_config(const KeyValueConfig& cfg);
};

/// Running-variable polynomial terms, then literacy and caste shares.
std::vector<std::string> default_controls(const ModelOptions& opts);

inline constexpr const char* kTreatment = "statutory_2011";
inline constexpr const char* kInstrument = "z";

/// statutory_2011 on z with controls (instrument carried for partial R²).
RegressionSpec first_stage_spec(const ModelOptions& opts, bool local);
/// outcome on z with controls.
RegressionSpec reduced_form_spec(const ModelOptions& opts, const std::string& outcome, bool local);
/// outcome on statutory_2011 instrumented by z.
RegressionSpec main_effect_spec(const ModelOptions& opts, const std::string& outcome, bool local);
/// outcome on statutory_2011 (as the first control) by OLS, ignoring the instrument.
RegressionSpec naive_ols_spec(const ModelOptions& opts, const std::string& outcome, bool local);
/// outcome on z among settlements that never became statutory.
RegressionSpec direct_effect_spec(const ModelOptions& opts, const std::string& outcome, bool local);

}  // namespace frontier_rd::models
