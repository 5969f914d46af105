#include "frontier_rd/rd_design.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "frontier_rd/csv.hpp"
#include "frontier_rd/error.hpp"

namespace frontier_rd::design {

std::string_view to_string(FrontierMode mode) {
  return mode == FrontierMode::soft ? "soft" : "hard";
}

void DesignConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("design config: ") + name + " must be strictly positive");
    }
  };
  positive(cutoffs.population, "population_cutoff");
  positive(cutoffs.density, "density_cutoff");
  positive(cutoffs.nonag_share, "nonag_cutoff");
  positive(population_bandwidth, "population_bandwidth");
  positive(density_bandwidth, "density_bandwidth");
  positive(nonag_bandwidth, "nonag_bandwidth");
  positive(softmin_temperature, "softmin_temperature");
}

DesignConfig DesignConfig::from_config(const KeyValueConfig& cfg) {
  DesignConfig out;
  out.cutoffs.population = cfg.get_double("population_cutoff", out.cutoffs.population);
  out.cutoffs.density = cfg.get_double("density_cutoff", out.cutoffs.density);
  out.cutoffs.nonag_share = cfg.get_double("nonag_cutoff", out.cutoffs.nonag_share);
  out.cutoffs.inclusive = cfg.get_bool("inclusive_at_cutoff", out.cutoffs.inclusive);
  out.population_bandwidth = cfg.get_double("population_bandwidth", out.population_bandwidth);
  out.density_bandwidth = cfg.get_double("density_bandwidth", out.density_bandwidth);
  out.nonag_bandwidth = cfg.get_double("nonag_bandwidth", out.nonag_bandwidth);
  out.softmin_temperature = cfg.get_double("softmin_temperature", out.softmin_temperature);
  const std::string mode = cfg.get_string("frontier_mode", "soft");
  if (mode == "soft") {
    out.frontier_mode = FrontierMode::soft;
  } else if (mode == "hard") {
    out.frontier_mode = FrontierMode::hard;
  } else {
    throw ConfigError("design config: frontier_mode must be 'soft' or 'hard', got '" + mode + "'");
  }
  out.validate();
  return out;
}

KeyValueConfig DesignConfig::to_config() const {
  KeyValueConfig cfg;
  cfg.set("population_cutoff", csv::format_double(cutoffs.population));
  cfg.set("density_cutoff", csv::format_double(cutoffs.density));
  cfg.set("nonag_cutoff", csv::format_double(cutoffs.nonag_share));
  cfg.set("inclusive_at_cutoff", cutoffs.inclusive ? "true" : "false");
  cfg.set("population_bandwidth", csv::format_double(population_bandwidth));
  cfg.set("density_bandwidth", csv::format_double(density_bandwidth));
  cfg.set("nonag_bandwidth", csv::format_double(nonag_bandwidth));
  cfg.set("softmin_temperature", csv::format_double(softmin_temperature));
  cfg.set("frontier_mode", std::string(to_string(frontier_mode)));
  return cfg;
}

double NormalizedDistances::min() const { return std::min({r_p, r_d, r_n}); }

NormalizedDistances normalize(double population, double density, double nonag_share,
                              const DesignConfig& cfg) {
  if (!std::isfinite(population)) throw DesignError("running variable population_2001 undefined");
  if (!std::isfinite(density)) throw DesignError("running variable density_2001 undefined");
  if (!std::isfinite(nonag_share)) {
    throw DesignError("running variable nonag_male_share_2001 undefined");
  }
  return {population / cfg.cutoffs.population - 1.0, density / cfg.cutoffs.density - 1.0,
          nonag_share / cfg.cutoffs.nonag_share - 1.0};
}

NormalizedDistances normalize(const data::Settlement& s, const DesignConfig& cfg) {
  if (!s.density_2001) {
    throw DesignError("settlement '" + s.settlement_id + "': running variable density_2001 undefined");
  }
  if (!s.nonag_male_share_2001) {
    throw DesignError("settlement '" + s.settlement_id +
                      "': running variable nonag_male_share_2001 undefined");
  }
  return normalize(static_cast<double>(s.population_2001), *s.density_2001,
                   *s.nonag_male_share_2001, cfg);
}

Eligibility eligibility(const NormalizedDistances& r, const DesignConfig& cfg) {
  auto meets = [&](double v) { return cfg.cutoffs.inclusive ? v >= 0.0 : v > 0.0; };
  Eligibility e;
  e.z_p = meets(r.r_p);
  e.z_d = meets(r.r_d);
  e.z_n = meets(r.r_n);
  e.z = e.z_p && e.z_d && e.z_n;
  return e;
}

Eligibility eligibility(const data::Settlement& s, const DesignConfig& cfg) {
  normalize(s, cfg);  // same errors as the distance path
  Eligibility e;
  e.z_p = cfg.cutoffs.meets_population(s);
  e.z_d = cfg.cutoffs.meets_density(s);
  e.z_n = cfg.cutoffs.meets_nonag(s);
  e.z = e.z_p && e.z_d && e.z_n;
  return e;
}

double frontier_distance(double r_p, double r_d, double r_n, double temperature) {
  if (!(temperature > 0.0)) throw DesignError("frontier_distance: temperature must be positive");
  const double m = std::min({r_p, r_d, r_n});
  const double sum = std::exp(-(r_p - m) / temperature) + std::exp(-(r_d - m) / temperature) +
                     std::exp(-(r_n - m) / temperature);
  // sum is in [1, 3]
  return m - temperature * std::log(sum);
}

double hard_frontier_distance(double r_p, double r_d, double r_n) {
  return std::min({r_p, r_d, r_n});
}

double frontier_distance(const NormalizedDistances& r, const DesignConfig& cfg) {
  return cfg.frontier_mode == FrontierMode::hard
             ? hard_frontier_distance(r.r_p, r.r_d, r.r_n)
             : frontier_distance(r.r_p, r.r_d, r.r_n, cfg.softmin_temperature);
}

bool local_filter(double population, double density, double nonag_share, const DesignConfig& cfg) {
  return std::abs(population - cfg.cutoffs.population) <= cfg.population_bandwidth &&
         std::abs(density - cfg.cutoffs.density) <= cfg.density_bandwidth &&
         std::abs(nonag_share - cfg.cutoffs.nonag_share) <= cfg.nonag_bandwidth;
}

bool local_filter(const data::Settlement& s, const DesignConfig& cfg) {
  if (!s.density_2001) {
    throw DesignError("settlement '" + s.settlement_id + "': running variable density_2001 undefined");
  }
  if (!s.nonag_male_share_2001) {
    throw DesignError("settlement '" + s.settlement_id +
                      "': running variable nonag_male_share_2001 undefined");
  }
  return local_filter(static_cast<double>(s.population_2001), *s.density_2001,
                      *s.nonag_male_share_2001, cfg);
}

Design build_design(const data::Dataset& d, const DesignConfig& cfg) {
  cfg.validate();
  Design out;
  out.rows.reserve(d.size());
  out.source_rows.reserve(d.size());
  const auto& settlements = d.settlements();
  for (std::size_t i = 0; i < settlements.size(); ++i) {
    const auto& s = settlements[i];
    try {
      const NormalizedDistances r = normalize(s, cfg);
      const Eligibility e = eligibility(s, cfg);
      DesignedRow row;
      row.settlement_id = s.settlement_id;
      row.r_p = r.r_p;
      row.r_d = r.r_d;
      row.r_n = r.r_n;
      row.z_p = e.z_p;
      row.z_d = e.z_d;
      row.z_n = e.z_n;
      row.z = e.z;
      row.frontier = frontier_distance(r, cfg);
      row.in_local_sample = local_filter(s, cfg);
      out.rows.push_back(std::move(row));
      out.source_rows.push_back(i);
    } catch (const DesignError& e) {
      out.exclusions.push_back({s.settlement_id, e.what()});
    }
  }
  return out;
}

void write_design_csv(const Design& design, std::ostream& out) {
  csv::write_row(out, {"settlement_id", "r_p", "r_d", "r_n", "z_p", "z_d", "z_n", "z", "frontier",
                       "in_local_sample"});
  auto b = [](bool v) { return std::string(v ? "1" : "0"); };
  for (const auto& r : design.rows) {
    csv::write_row(out, {r.settlement_id, csv::format_double(r.r_p), csv::format_double(r.r_d),
                         csv::format_double(r.r_n), b(r.z_p), b(r.z_d), b(r.z_n), b(r.z),
                         csv::format_double(r.frontier), b(r.in_local_sample)});
  }
}

SampleFilter parse_sample_filter(std::string_view name) {
  if (name == "all") return SampleFilter::all;
  if (name == "local") return SampleFilter::local;
  if (name == "never_treated") return SampleFilter::never_treated;
  if (name == "local_never_treated") return SampleFilter::local_never_treated;
  throw SpecError("unknown sample filter '" + std::string(name) + "'");
}

std::string_view to_string(SampleFilter f) {
  switch (f) {
    case SampleFilter::all: return "all";
    case SampleFilter::local: return "local";
    case SampleFilter::never_treated: return "never_treated";
    case SampleFilter::local_never_treated: return "local_never_treated";
  }
  return "all";
}

// ---------------------------------------------------------------------------
// Panel

Panel::Panel(std::shared_ptr<const data::Dataset> dataset, DesignConfig cfg)
    : dataset_(std::move(dataset)), cfg_(cfg), design_(build_design(*dataset_, cfg_)) {}

const data::Settlement& Panel::settlement(std::size_t row) const {
  return dataset_->settlements()[design_.source_rows[row]];
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// "<base>^<k>" with k a positive integer.
bool split_power(std::string_view field, std::string_view& base, int& power) {
  const auto caret = field.rfind('^');
  if (caret == std::string_view::npos) return false;
  base = field.substr(0, caret);
  const auto digits = field.substr(caret + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), power);
  return ec == std::errc() && ptr == digits.data() + digits.size() && power >= 1 && !base.empty();
}

}  // namespace

bool Panel::has_column(std::string_view field) const {
  try {
    (void)column(field);
    return true;
  } catch (const SpecError&) {
    return false;
  }
}

std::vector<double> Panel::column(std::string_view field) const {
  std::string_view base;
  int power = 1;
  if (split_power(field, base, power)) {
    auto values = column(base);
    for (double& v : values) v = std::pow(v, power);
    return values;
  }

  const std::size_t n = size();
  std::vector<double> out(n);
  auto fill_row = [&](auto getter) {
    for (std::size_t i = 0; i < n; ++i) out[i] = getter(design_.rows[i]);
    return out;
  };
  auto fill_settlement = [&](auto getter) {
    for (std::size_t i = 0; i < n; ++i) out[i] = getter(settlement(i));
    return out;
  };
  auto b = [](bool v) { return v ? 1.0 : 0.0; };

  if (field == "r_p") return fill_row([](const DesignedRow& r) { return r.r_p; });
  if (field == "r_d") return fill_row([](const DesignedRow& r) { return r.r_d; });
  if (field == "r_n") return fill_row([](const DesignedRow& r) { return r.r_n; });
  if (field == "z_p") return fill_row([&](const DesignedRow& r) { return b(r.z_p); });
  if (field == "z_d") return fill_row([&](const DesignedRow& r) { return b(r.z_d); });
  if (field == "z_n") return fill_row([&](const DesignedRow& r) { return b(r.z_n); });
  if (field == "z") return fill_row([&](const DesignedRow& r) { return b(r.z); });
  if (field == "frontier") return fill_row([](const DesignedRow& r) { return r.frontier; });
  if (field == "in_local_sample") {
    return fill_row([&](const DesignedRow& r) { return b(r.in_local_sample); });
  }
  using data::Settlement;
  if (field == "population_2001") {
    return fill_settlement([](const Settlement& s) { return static_cast<double>(s.population_2001); });
  }
  if (field == "log_population") {
    return fill_settlement([](const Settlement& s) {
      return s.population_2001 > 0 ? std::log(static_cast<double>(s.population_2001)) : kNaN;
    });
  }
  if (field == "area_2001") return fill_settlement([](const Settlement& s) { return s.area_2001; });
  if (field == "density_2001") {
    return fill_settlement([](const Settlement& s) { return s.density_2001.value_or(kNaN); });
  }
  if (field == "log_density") {
    return fill_settlement([](const Settlement& s) {
      return s.density_2001 && *s.density_2001 > 0.0 ? std::log(*s.density_2001) : kNaN;
    });
  }
  if (field == "nonag_male_share_2001") {
    return fill_settlement([](const Settlement& s) { return s.nonag_male_share_2001.value_or(kNaN); });
  }
  if (field == "literacy_rate_2001") {
    return fill_settlement([](const Settlement& s) { return s.literacy_rate_2001; });
  }
  if (field == "main_worker_rate_2001") {
    return fill_settlement([](const Settlement& s) { return s.main_worker_rate_2001; });
  }
  if (field == "sc_share_2001") return fill_settlement([](const Settlement& s) { return s.sc_share_2001; });
  if (field == "st_share_2001") return fill_settlement([](const Settlement& s) { return s.st_share_2001; });
  if (field == "ct_2001") return fill_settlement([&](const Settlement& s) { return b(s.ct_2001); });
  if (field == "statutory_2011") {
    return fill_settlement([&](const Settlement& s) { return b(s.statutory_2011); });
  }
  if (dataset_->has_outcome(field)) {
    return fill_settlement([&](const Settlement& s) { return s.outcome(field).value_or(kNaN); });
  }
  throw SpecError("unknown variable '" + std::string(field) + "'");
}

std::vector<std::string> Panel::group_keys(std::string_view field) const {
  std::vector<std::string> keys(size());
  if (field == "district_id") {
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = settlement(i).district_id;
  } else if (field == "state_id") {
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = settlement(i).state_id;
  } else {
    throw SpecError("unknown group key field '" + std::string(field) + "'");
  }
  return keys;
}

std::vector<bool> Panel::sample_mask(SampleFilter filter) const {
  std::vector<bool> mask(size(), true);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const bool local = design_.rows[i].in_local_sample;
    const bool never = !settlement(i).statutory_2011;
    switch (filter) {
      case SampleFilter::all: break;
      case SampleFilter::local: mask[i] = local; break;
      case SampleFilter::never_treated: mask[i] = never; break;
      case SampleFilter::local_never_treated: mask[i] = local && never; break;
    }
  }
  return mask;
}

}  // namespace frontier_rd::design
