#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frontier_rd/kv_config.hpp"

namespace frontier_rd::data {

/// One settlement of the analysis panel: 2001 running variables and
/// controls, 2011 treatment status and outcome counts.
struct Settlement {
  std::string settlement_id;
  std::string state_id;
  std::string district_id;  // cluster key

  std::int64_t population_2001 = 0;
  double area_2001 = 0.0;                       // km²
  std::optional<double> density_2001;           // persons/km², empty when area is zero
  std::optional<double> nonag_male_share_2001;  // empty when there are no male main workers

  double literacy_rate_2001 = 0.0;
  double main_worker_rate_2001 = 0.0;
  double sc_share_2001 = 0.0;
  double st_share_2001 = 0.0;

  bool ct_2001 = false;         // met all three census-town thresholds
  bool statutory_2011 = false;  // treatment

  std::map<std::string, std::optional<double>, std::less<>> outcomes;

  std::optional<double> outcome(std::string_view name) const;
};

/// Population per km², or empty for a non-positive area.
std::optional<double> compute_density(std::int64_t population, double area);

/// The census-town rule: population, density and non-agricultural male
/// main-worker share thresholds.
struct Thresholds {
  double population = 5000.0;
  double density = 400.0;
  double nonag_share = 0.75;
  bool inclusive = true;  // a value exactly at the cutoff meets it

  bool meets_population(const Settlement& s) const;
  bool meets_density(const Settlement& s) const;
  bool meets_nonag(const Settlement& s) const;
  bool meets_all(const Settlement& s) const;
};

struct Exclusion {
  std::string settlement_id;
  std::string reason;
};

struct Provenance {
  std::string source;
  std::size_t rows_ingested = 0;
  std::size_t rows_retained = 0;
  std::size_t rows_excluded = 0;
};

/// Validated, immutable settlement panel.
class Dataset {
 public:
  Dataset() = default;
  /// Validates unique ids, nonempty district ids, share ranges and the
  /// row accounting (ingested = retained + excluded).
  Dataset(std::vector<Settlement> settlements, std::vector<std::string> outcome_names,
          Provenance provenance, std::vector<Exclusion> exclusions = {},
          std::vector<std::string> warnings = {});

  /// Programmatic construction (synthetic panels): every row is retained.
  static Dataset from_settlements(std::vector<Settlement> settlements,
                                  std::vector<std::string> outcome_names, std::string source);

  const std::vector<Settlement>& settlements() const { return settlements_; }
  std::size_t size() const { return settlements_.size(); }
  bool empty() const { return settlements_.empty(); }
  const std::vector<std::string>& outcome_names() const { return outcome_names_; }
  bool has_outcome(std::string_view name) const;
  const Provenance& provenance() const { return provenance_; }
  const std::vector<Exclusion>& exclusion_log() const { return exclusions_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<Settlement> settlements_;
  std::vector<std::string> outcome_names_;
  Provenance provenance_;
  std::vector<Exclusion> exclusions_;
  std::vector<std::string> warnings_;
};

/// Maps canonical field names onto source CSV columns.
///
/// Sidecar format (plain `key = value`):
///
///     settlement_id = town_code
///     population_2001 = pc01_pca_tot_p
///     outcome.primary_schools = pc11_vd_p_sch_gov
///
/// Without an explicit outcome list every unmapped column is taken as an
/// outcome named after the column.
class Schema {
 public:
  static Schema identity();
  static Schema from_config(const KeyValueConfig& cfg);
  static Schema load(const std::filesystem::path& path);

  /// Source column for a canonical field (identity when unmapped).
  std::string column_for(std::string_view field) const;
  const std::vector<std::pair<std::string, std::string>>& outcomes() const { return outcomes_; }
  bool outcomes_from_extra_columns() const { return outcomes_.empty(); }

  static const std::vector<std::string>& canonical_fields();

 private:
  std::map<std::string, std::string, std::less<>> columns_;
  std::vector<std::pair<std::string, std::string>> outcomes_;  // name -> column
};

Dataset ingest_csv(const std::filesystem::path& path, const Schema& schema = Schema::identity());
Dataset ingest_csv(std::istream& in, const Schema& schema, const std::string& source_name);

/// Canonical CSV snapshot, re-ingestable with the identity schema.
void write_snapshot(const Dataset& d, std::ostream& out);
void write_exclusion_log(const Dataset& d, std::ostream& out);

/// 2×2 table of counts. `cells[row][col]`, row/col index 0 = "No"/"below".
struct CrossTab {
  std::string title;
  std::string row_variable;
  std::string col_variable;
  std::array<std::string, 2> row_labels;
  std::array<std::string, 2> col_labels;
  std::array<std::array<std::size_t, 2>, 2> cells{};

  std::size_t total() const;
  double share_percent(int row, int col) const;
};

/// Statutory status (rows) by each threshold and by all three combined (cols).
struct ThresholdCrossTabs {
  CrossTab population;
  CrossTab density;
  CrossTab nonag;
  CrossTab combined;
};

ThresholdCrossTabs crosstab_thresholds(const Dataset& d, const Thresholds& thresholds = {});

/// CT status in 2001 (rows) by statutory status in 2011 (cols), optionally
/// restricted by a sample predicate.
CrossTab crosstab_treatment(const Dataset& d,
                            const std::function<bool(const Settlement&)>& filter = {});

}  // namespace frontier_rd::data
