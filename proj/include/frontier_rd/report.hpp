#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "frontier_rd/diagnostics.hpp"
#include "frontier_rd/linreg.hpp"
#include "frontier_rd/settlement_data.hpp"
#include "frontier_rd/synthetic_dgp.hpp"

// JSON is the machine contract for every table; the text renderers work
// from the JSON so `report` can re-render saved results.
namespace frontier_rd::report {

using Json = nlohmann::ordered_json;

inline constexpr double kMatchedScaleReferenceF = 18.05;

std::string stars(double p);

Json coefficient_json(const linreg::FitResult& fit, const std::string& name, double level = 0.95);
Json fit_json(const linreg::FitResult& fit);
Json first_stage_json(const diag::FirstStageDiagnostics& fs);
Json density_json(const std::string& variable, const diag::DensityTestResult& r,
                  bool include_histogram = false);
Json balance_json(const std::vector<diag::BalanceRow>& rows);
Json exclusion_json(const std::vector<diag::ExclusionRow>& rows);
Json crosstab_json(const data::CrossTab& t);
Json monte_carlo_json(const dgp::MonteCarloSummary& s, bool include_records = false);

// Text layouts. Each takes the object produced by the matching command.
std::string render_ingest(const Json& j);
std::string render_design(const Json& j);
std::string render_estimate(const Json& j);
std::string render_diagnose(const Json& j);
std::string render_simulate(const Json& j);
/// Dispatches on j["command"].
std::string render(const Json& j);

// Flat CSV views of the main table of each command.
void write_csv(const Json& j, std::ostream& out);

/// One row per bin: side, bin_lo, bin_hi, x_mean, y_mean, n, fitted.
void write_binned_csv(const diag::BinnedSeries& s, std::ostream& out);

}  // namespace frontier_rd::report
