#include "frontier_rd/settlement_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "frontier_rd/csv.hpp"
#include "frontier_rd/error.hpp"

namespace frontier_rd::data {
namespace {

constexpr const char* kShareFields[] = {"literacy_rate_2001", "main_worker_rate_2001",
                                        "sc_share_2001", "st_share_2001"};

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "." || s == "null" ||
         s == "NULL";
}

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

double share_field(const Settlement& s, std::string_view field) {
  if (field == "literacy_rate_2001") return s.literacy_rate_2001;
  if (field == "main_worker_rate_2001") return s.main_worker_rate_2001;
  if (field == "sc_share_2001") return s.sc_share_2001;
  return s.st_share_2001;
}

}  // namespace

std::optional<double> Settlement::outcome(std::string_view name) const {
  const auto it = outcomes.find(name);
  if (it == outcomes.end()) return std::nullopt;
  return it->second;
}

std::optional<double> compute_density(std::int64_t population, double area) {
  if (!(area > 0.0)) return std::nullopt;
  return static_cast<double>(population) / area;
}

bool Thresholds::meets_population(const Settlement& s) const {
  const double p = static_cast<double>(s.population_2001);
  return inclusive ? p >= population : p > population;
}

bool Thresholds::meets_density(const Settlement& s) const {
  if (!s.density_2001) return false;
  return inclusive ? *s.density_2001 >= density : *s.density_2001 > density;
}

bool Thresholds::meets_nonag(const Settlement& s) const {
  if (!s.nonag_male_share_2001) return false;
  return inclusive ? *s.nonag_male_share_2001 >= nonag_share
                   : *s.nonag_male_share_2001 > nonag_share;
}

bool Thresholds::meets_all(const Settlement& s) const {
  return meets_population(s) && meets_density(s) && meets_nonag(s);
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<Settlement> settlements, std::vector<std::string> outcome_names,
                 Provenance provenance, std::vector<Exclusion> exclusions,
                 std::vector<std::string> warnings)
    : settlements_(std::move(settlements)),
      outcome_names_(std::move(outcome_names)),
      provenance_(std::move(provenance)),
      exclusions_(std::move(exclusions)),
      warnings_(std::move(warnings)) {
  std::unordered_map<std::string_view, std::size_t> seen;
  seen.reserve(settlements_.size());
  for (std::size_t i = 0; i < settlements_.size(); ++i) {
    const auto& s = settlements_[i];
    if (!seen.emplace(s.settlement_id, i).second) {
      throw DuplicateError("duplicate settlement_id '" + s.settlement_id + "'");
    }
    if (s.district_id.empty()) {
      throw InputError("settlement '" + s.settlement_id + "' has an empty district_id");
    }
    for (const char* f : kShareFields) {
      if (!in_unit_interval(share_field(s, f))) {
        throw InputError("settlement '" + s.settlement_id + "': " + f + " outside [0,1]");
      }
    }
    if (s.nonag_male_share_2001 && !in_unit_interval(*s.nonag_male_share_2001)) {
      throw InputError("settlement '" + s.settlement_id +
                       "': nonag_male_share_2001 outside [0,1]");
    }
  }
  if (provenance_.rows_retained != settlements_.size() ||
      provenance_.rows_excluded != exclusions_.size() ||
      provenance_.rows_ingested != provenance_.rows_retained + provenance_.rows_excluded) {
    throw InputError("dataset row accounting does not balance");
  }
}

Dataset Dataset::from_settlements(std::vector<Settlement> settlements,
                                  std::vector<std::string> outcome_names, std::string source) {
  Provenance p;
  p.source = std::move(source);
  p.rows_ingested = p.rows_retained = settlements.size();
  return Dataset(std::move(settlements), std::move(outcome_names), std::move(p));
}

bool Dataset::has_outcome(std::string_view name) const {
  return std::find(outcome_names_.begin(), outcome_names_.end(), name) != outcome_names_.end();
}

// ---------------------------------------------------------------------------
// Schema

const std::vector<std::string>& Schema::canonical_fields() {
  static const std::vector<std::string> fields = {
      "settlement_id",         "state_id",
      "district_id",           "population_2001",
      "area_2001",             "density_2001",
      "nonag_male_share_2001", "male_main_workers_2001",
      "nonag_male_main_workers_2001",
      "literacy_rate_2001",    "main_worker_rate_2001",
      "sc_share_2001",         "st_share_2001",
      "ct_2001",               "statutory_2011"};
  return fields;
}

Schema Schema::identity() { return Schema{}; }

Schema Schema::from_config(const KeyValueConfig& cfg) {
  Schema schema;
  const auto& fields = canonical_fields();
  for (const auto& [key, value] : cfg.entries()) {
    if (key.rfind("outcome.", 0) == 0) {
      const std::string name = key.substr(8);
      if (name.empty() || value.empty()) throw SchemaError("schema: empty outcome mapping '" + key + "'");
      schema.outcomes_.emplace_back(name, value);
    } else if (std::find(fields.begin(), fields.end(), key) != fields.end()) {
      if (value.empty()) throw SchemaError("schema: empty column for field '" + key + "'");
      schema.columns_[key] = value;
    } else {
      throw SchemaError("schema: unknown canonical field '" + key + "'");
    }
    cfg.mark_consumed(key);
  }
  return schema;
}

Schema Schema::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path));
}

std::string Schema::column_for(std::string_view field) const {
  const auto it = columns_.find(field);
  return it == columns_.end() ? std::string(field) : it->second;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

struct ColumnMap {
  std::unordered_map<std::string, std::size_t> index;

  std::optional<std::size_t> find(const std::string& column) const {
    const auto it = index.find(column);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

class RowReader {
 public:
  RowReader(const std::vector<std::string>& row, std::size_t line, const std::string& source)
      : row_(row), line_(line), source_(source) {}

  const std::string& text(std::size_t col) const { return row_[col]; }

  std::optional<double> number(std::size_t col, std::string_view field) const {
    const std::string& cell = row_[col];
    if (is_missing_token(cell)) return std::nullopt;
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
      throw ParseError(source_, line_,
                       "field '" + std::string(field) + "': not a number: '" + cell + "'");
    }
    return v;
  }

  std::optional<bool> boolean(std::size_t col, std::string_view field) const {
    const std::string& cell = row_[col];
    if (is_missing_token(cell)) return std::nullopt;
    bool b = false;
    if (!parse_bool(cell, b)) {
      throw ParseError(source_, line_,
                       "field '" + std::string(field) + "': not a boolean: '" + cell + "'");
    }
    return b;
  }

 private:
  const std::vector<std::string>& row_;
  std::size_t line_;
  const std::string& source_;
};

}  // namespace

Dataset ingest_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return ingest_csv(in, schema, path.string());
}

Dataset ingest_csv(std::istream& in, const Schema& schema, const std::string& source_name) {
  const csv::Table table = csv::read(in, source_name);

  ColumnMap columns;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (!columns.index.emplace(table.header[i], i).second) {
      throw SchemaError(source_name + ": duplicate header column '" + table.header[i] + "'");
    }
  }

  auto require = [&](const std::string& field) {
    const std::string col = schema.column_for(field);
    const auto idx = columns.find(col);
    if (!idx) {
      throw SchemaError(source_name + ": missing mandatory column '" + col + "' (field " + field +
                        ")");
    }
    return *idx;
  };
  auto optional_col = [&](const std::string& field) { return columns.find(schema.column_for(field)); };

  const std::size_t c_id = require("settlement_id");
  const std::size_t c_state = require("state_id");
  const std::size_t c_district = require("district_id");
  const std::size_t c_pop = require("population_2001");
  const std::size_t c_area = require("area_2001");
  const auto c_density = optional_col("density_2001");
  const auto c_share = optional_col("nonag_male_share_2001");
  const auto c_male = optional_col("male_main_workers_2001");
  const auto c_nonag_male = optional_col("nonag_male_main_workers_2001");
  if (!c_share && !(c_male && c_nonag_male)) {
    throw SchemaError(source_name + ": missing mandatory column '" +
                      schema.column_for("nonag_male_share_2001") +
                      "' (field nonag_male_share_2001, or both male_main_workers_2001 and "
                      "nonag_male_main_workers_2001)");
  }
  const std::size_t c_lit = require("literacy_rate_2001");
  const std::size_t c_mw = require("main_worker_rate_2001");
  const std::size_t c_sc = require("sc_share_2001");
  const std::size_t c_st = require("st_share_2001");
  const auto c_ct = optional_col("ct_2001");
  const std::size_t c_statutory = require("statutory_2011");

  std::vector<std::pair<std::string, std::size_t>> outcome_cols;
  if (schema.outcomes_from_extra_columns()) {
    std::set<std::size_t> used;
    for (const auto& f : Schema::canonical_fields()) {
      if (auto idx = columns.find(schema.column_for(f))) used.insert(*idx);
    }
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (!used.contains(i)) outcome_cols.emplace_back(table.header[i], i);
    }
  } else {
    for (const auto& [name, col] : schema.outcomes()) {
      const auto idx = columns.find(col);
      if (!idx) {
        throw SchemaError(source_name + ": missing outcome column '" + col + "' (outcome " + name +
                          ")");
      }
      outcome_cols.emplace_back(name, *idx);
    }
  }
  std::vector<std::string> outcome_names;
  for (const auto& [name, idx] : outcome_cols) outcome_names.push_back(name);

  const Thresholds thresholds;
  std::vector<Settlement> retained;
  std::vector<Exclusion> excluded;
  std::vector<std::string> warnings;
  std::unordered_map<std::string, std::size_t> seen_ids;
  retained.reserve(table.rows.size());

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto line = table.line_numbers[r];
    const RowReader row(table.rows[r], line, source_name);

    Settlement s;
    s.settlement_id = row.text(c_id);
    if (s.settlement_id.empty()) throw ParseError(source_name, line, "empty settlement_id");
    if (const auto [it, inserted] = seen_ids.emplace(s.settlement_id, line); !inserted) {
      throw DuplicateError(source_name + ":" + std::to_string(line) + ": duplicate settlement_id '" +
                           s.settlement_id + "' (first seen on line " + std::to_string(it->second) +
                           ")");
    }
    s.state_id = row.text(c_state);
    s.district_id = row.text(c_district);

    // Parse everything first so malformed cells always raise, then decide
    // exclusion in a fixed order.
    const auto pop = row.number(c_pop, "population_2001");
    const auto area = row.number(c_area, "area_2001");
    const auto file_density = c_density ? row.number(*c_density, "density_2001") : std::nullopt;
    const auto share = c_share ? row.number(*c_share, "nonag_male_share_2001") : std::nullopt;
    const auto male = c_male ? row.number(*c_male, "male_main_workers_2001") : std::nullopt;
    const auto nonag_male =
        c_nonag_male ? row.number(*c_nonag_male, "nonag_male_main_workers_2001") : std::nullopt;
    const auto lit = row.number(c_lit, "literacy_rate_2001");
    const auto mw = row.number(c_mw, "main_worker_rate_2001");
    const auto sc = row.number(c_sc, "sc_share_2001");
    const auto st = row.number(c_st, "st_share_2001");
    const auto ct = c_ct ? row.boolean(*c_ct, "ct_2001") : std::nullopt;
    const auto statutory = row.boolean(c_statutory, "statutory_2011");

    for (const auto& [name, idx] : outcome_cols) {
      auto v = row.number(idx, name);
      if (v && !std::isfinite(*v)) v.reset();
      s.outcomes.emplace(name, v);
    }

    auto exclude = [&](std::string reason) {
      excluded.push_back({s.settlement_id, std::move(reason)});
    };

    if (s.district_id.empty()) { exclude("missing district_id"); continue; }
    if (!pop) { exclude("missing population_2001"); continue; }
    if (!(*pop >= 0.0) || !std::isfinite(*pop)) { exclude("population_2001 out of range"); continue; }
    if (std::floor(*pop) != *pop) { exclude("population_2001 not an integer"); continue; }
    s.population_2001 = static_cast<std::int64_t>(*pop);
    if (!area) { exclude("missing area_2001"); continue; }
    if (!(*area >= 0.0) || !std::isfinite(*area)) { exclude("area_2001 out of range"); continue; }
    s.area_2001 = *area;
    s.density_2001 = compute_density(s.population_2001, s.area_2001);
    if (!s.density_2001) { exclude("density undefined"); continue; }

    if (c_share && share) {
      if (!in_unit_interval(*share)) { exclude("nonag_male_share_2001 out of range"); continue; }
      s.nonag_male_share_2001 = *share;
    } else if (male && nonag_male) {
      if (*male == 0.0) { exclude("non-ag share undefined (zero male main workers)"); continue; }
      if (*male < 0.0 || *nonag_male < 0.0 || *nonag_male > *male) {
        exclude("nonag_male_share_2001 out of range");
        continue;
      }
      s.nonag_male_share_2001 = *nonag_male / *male;
    } else if (c_share) {
      exclude("missing nonag_male_share_2001");
      continue;
    } else {
      exclude("missing male main worker counts");
      continue;
    }

    bool bad_share = false;
    const std::pair<const char*, const std::optional<double>*> shares[] = {
        {"literacy_rate_2001", &lit}, {"main_worker_rate_2001", &mw},
        {"sc_share_2001", &sc}, {"st_share_2001", &st}};
    for (const auto& [field, value] : shares) {
      if (!*value) { exclude(std::string("missing ") + field); bad_share = true; break; }
      if (!in_unit_interval(**value)) { exclude(std::string(field) + " out of range"); bad_share = true; break; }
    }
    if (bad_share) continue;
    s.literacy_rate_2001 = *lit;
    s.main_worker_rate_2001 = *mw;
    s.sc_share_2001 = *sc;
    s.st_share_2001 = *st;

    if (!statutory) { exclude("missing statutory_2011"); continue; }
    s.statutory_2011 = *statutory;
    s.ct_2001 = ct ? *ct : thresholds.meets_all(s);

    if (file_density) {
      const double computed = *s.density_2001;
      if (std::abs(*file_density - computed) > 0.01 * std::abs(computed)) {
        warnings.push_back("settlement '" + s.settlement_id + "': density_2001 in file (" +
                           csv::format_double(*file_density) + ") differs from population/area (" +
                           csv::format_double(computed) + ") by more than 1%");
      }
    }
    retained.push_back(std::move(s));
  }

  Provenance prov;
  prov.source = source_name;
  prov.rows_ingested = table.rows.size();
  prov.rows_retained = retained.size();
  prov.rows_excluded = excluded.size();
  return Dataset(std::move(retained), std::move(outcome_names), std::move(prov),
                 std::move(excluded), std::move(warnings));
}

void write_snapshot(const Dataset& d, std::ostream& out) {
  std::vector<std::string> header = {
      "settlement_id",      "state_id",              "district_id",   "population_2001",
      "area_2001",          "density_2001",          "nonag_male_share_2001",
      "literacy_rate_2001", "main_worker_rate_2001", "sc_share_2001", "st_share_2001",
      "ct_2001",            "statutory_2011"};
  for (const auto& name : d.outcome_names()) header.push_back(name);
  csv::write_row(out, header);

  auto opt = [](const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); };
  std::vector<std::string> row;
  for (const auto& s : d.settlements()) {
    row = {s.settlement_id,
           s.state_id,
           s.district_id,
           std::to_string(s.population_2001),
           csv::format_double(s.area_2001),
           opt(s.density_2001),
           opt(s.nonag_male_share_2001),
           csv::format_double(s.literacy_rate_2001),
           csv::format_double(s.main_worker_rate_2001),
           csv::format_double(s.sc_share_2001),
           csv::format_double(s.st_share_2001),
           s.ct_2001 ? "1" : "0",
           s.statutory_2011 ? "1" : "0"};
    for (const auto& name : d.outcome_names()) row.push_back(opt(s.outcome(name)));
    csv::write_row(out, row);
  }
}

void write_exclusion_log(const Dataset& d, std::ostream& out) {
  csv::write_row(out, {"settlement_id", "reason"});
  for (const auto& e : d.exclusion_log()) csv::write_row(out, {e.settlement_id, e.reason});
}

// ---------------------------------------------------------------------------
// Cross-tabulations

std::size_t CrossTab::total() const {
  return cells[0][0] + cells[0][1] + cells[1][0] + cells[1][1];
}

double CrossTab::share_percent(int row, int col) const {
  const auto n = total();
  return n == 0 ? 0.0 : 100.0 * static_cast<double>(cells[row][col]) / static_cast<double>(n);
}

namespace {

CrossTab statutory_by(const Dataset& d, std::string title, std::string col_variable,
                      std::array<std::string, 2> col_labels,
                      const std::function<bool(const Settlement&)>& meets) {
  CrossTab t;
  t.title = std::move(title);
  t.row_variable = "statutory_2011";
  t.col_variable = std::move(col_variable);
  t.row_labels = {"Not Statutory", "Statutory"};
  t.col_labels = std::move(col_labels);
  for (const auto& s : d.settlements()) ++t.cells[s.statutory_2011 ? 1 : 0][meets(s) ? 1 : 0];
  return t;
}

std::string num_label(double v) {
  std::string s = csv::format_double(v);
  return s;
}

}  // namespace

ThresholdCrossTabs crosstab_thresholds(const Dataset& d, const Thresholds& th) {
  if (d.empty()) throw EmptyInputError("crosstab_thresholds: empty dataset");
  const std::string ge = th.inclusive ? " >= " : " > ";
  const std::string lt = th.inclusive ? " < " : " <= ";
  ThresholdCrossTabs out;
  out.population = statutory_by(
      d, "Population" + ge + num_label(th.population), "population_2001",
      {"Pop" + lt + num_label(th.population), "Pop" + ge + num_label(th.population)},
      [&](const Settlement& s) { return th.meets_population(s); });
  out.density = statutory_by(
      d, "Density" + ge + num_label(th.density) + " per km2", "density_2001",
      {"Density" + lt + num_label(th.density), "Density" + ge + num_label(th.density)},
      [&](const Settlement& s) { return th.meets_density(s); });
  out.nonag = statutory_by(
      d, "Non-Agricultural Male Workers" + ge + num_label(th.nonag_share), "nonag_male_share_2001",
      {"Non-Ag" + lt + num_label(th.nonag_share), "Non-Ag" + ge + num_label(th.nonag_share)},
      [&](const Settlement& s) { return th.meets_nonag(s); });
  out.combined = statutory_by(d, "All Three Thresholds Combined", "all_thresholds",
                              {"Did not Meet Thresholds", "Met Thresholds"},
                              [&](const Settlement& s) { return th.meets_all(s); });
  return out;
}

CrossTab crosstab_treatment(const Dataset& d, const std::function<bool(const Settlement&)>& filter) {
  if (d.empty()) throw EmptyInputError("crosstab_treatment: empty dataset");
  CrossTab t;
  t.title = filter ? "Treatment Assignment and Status (filtered sample)"
                   : "Treatment Assignment and Status";
  t.row_variable = "ct_2001";
  t.col_variable = "statutory_2011";
  t.row_labels = {"CT No", "CT Yes"};
  t.col_labels = {"Statutory No", "Statutory Yes"};
  for (const auto& s : d.settlements()) {
    if (filter && !filter(s)) continue;
    ++t.cells[s.ct_2001 ? 1 : 0][s.statutory_2011 ? 1 : 0];
  }
  return t;
}

}  // namespace frontier_rd::data
