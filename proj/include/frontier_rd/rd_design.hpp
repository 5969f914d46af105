#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "frontier_rd/kv_config.hpp"
#include "frontier_rd/settlement_data.hpp"

namespace frontier_rd::design {

enum class FrontierMode {
  soft,  // LogSumExp soft minimum with temperature
  hard,  // plain minimum of the three distances
};

std::string_view to_string(FrontierMode mode);

struct DesignConfig {
  data::Thresholds cutoffs;
  double population_bandwidth = 5000.0;
  double density_bandwidth = 400.0;
  double nonag_bandwidth = 0.2;
  double softmin_temperature = 0.05;
  FrontierMode frontier_mode = FrontierMode::soft;

  /// Throws ConfigError unless cutoffs, bandwidths and temperature are positive.
  void validate() const;

  /// Reads `population_cutoff`, `density_cutoff`, `nonag_cutoff`,
  /// `population_bandwidth`, `density_bandwidth`, `nonag_bandwidth`,
  /// `softmin_temperature`, `inclusive_at_cutoff`, `frontier_mode`.
  static DesignConfig from_config(const KeyValueConfig& cfg);
  KeyValueConfig to_config() const;
};

struct NormalizedDistances {
  double r_p = 0.0;
  double r_d = 0.0;
  double r_n = 0.0;

  double min() const;
};

struct Eligibility {
  bool z_p = false;
  bool z_d = false;
  bool z_n = false;
  bool z = false;
};

/// Distances to the cutoffs as ratios: value / cutoff - 1. Throws DesignError
/// naming the field when density or non-ag share is undefined.
NormalizedDistances normalize(const data::Settlement& s, const DesignConfig& cfg);
NormalizedDistances normalize(double population, double density, double nonag_share,
                              const DesignConfig& cfg);

Eligibility eligibility(const NormalizedDistances& r, const DesignConfig& cfg);
/// Compares the raw values with the cutoffs, so a value one ulp below a
/// cutoff never rounds into eligibility.
Eligibility eligibility(const data::Settlement& s, const DesignConfig& cfg);

/// Soft minimum -τ·ln(Σ exp(-r/τ)), evaluated around the hard minimum so it
/// never overflows. Lies in [min - τ·ln 3, min].
double frontier_distance(double r_p, double r_d, double r_n, double temperature);
double hard_frontier_distance(double r_p, double r_d, double r_n);
double frontier_distance(const NormalizedDistances& r, const DesignConfig& cfg);

/// Joint symmetric window around all three cutoffs.
bool local_filter(const data::Settlement& s, const DesignConfig& cfg);
bool local_filter(double population, double density, double nonag_share, const DesignConfig& cfg);

struct DesignedRow {
  std::string settlement_id;
  double r_p = 0.0;
  double r_d = 0.0;
  double r_n = 0.0;
  bool z_p = false;
  bool z_d = false;
  bool z_n = false;
  bool z = false;
  double frontier = 0.0;
  bool in_local_sample = false;

  friend bool operator==(const DesignedRow&, const DesignedRow&) = default;
};

struct Design {
  std::vector<DesignedRow> rows;
  std::vector<std::size_t> source_rows;  // index into Dataset::settlements() per row
  std::vector<data::Exclusion> exclusions;
};

/// One row per settlement whose running variables are defined, in dataset
/// order. Rows that fail normalization go to `exclusions`.
Design build_design(const data::Dataset& d, const DesignConfig& cfg);

void write_design_csv(const Design& design, std::ostream& out);

enum class SampleFilter { all, local, never_treated, local_never_treated };

SampleFilter parse_sample_filter(std::string_view name);
std::string_view to_string(SampleFilter f);

/// A dataset joined with its design, with named column access for model
/// assembly. Holds shared ownership of the dataset.
class Panel {
 public:
  Panel(std::shared_ptr<const data::Dataset> dataset, DesignConfig cfg);

  const data::Dataset& dataset() const { return *dataset_; }
  const DesignConfig& config() const { return cfg_; }
  const Design& design() const { return design_; }
  std::size_t size() const { return design_.rows.size(); }
  const data::Settlement& settlement(std::size_t row) const;

  /// Numeric column over design rows; NaN marks missing. Recognized fields:
  /// design columns (r_p, r_d, r_n, z_p, z_d, z_n, z, frontier,
  /// in_local_sample), settlement fields (population_2001, density_2001,
  /// nonag_male_share_2001, literacy_rate_2001, main_worker_rate_2001,
  /// sc_share_2001, st_share_2001, area_2001, ct_2001, statutory_2011),
  /// log_population, log_density, outcome names, and `<field>^k` powers.
  std::vector<double> column(std::string_view field) const;
  bool has_column(std::string_view field) const;

  /// Group keys for `district_id` or `state_id`.
  std::vector<std::string> group_keys(std::string_view field) const;

  std::vector<bool> sample_mask(SampleFilter filter) const;

 private:
  std::shared_ptr<const data::Dataset> dataset_;
  DesignConfig cfg_;
  Design design_;
};

}  // namespace frontier_rd::design
