#pragma once

#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "frontier_rd/settlement_data.hpp"

namespace fixtures {

inline const char* kToyHeader =
    "settlement_id,state_id,district_id,population_2001,area_2001,nonag_male_share_2001,"
    "literacy_rate_2001,main_worker_rate_2001,sc_share_2001,st_share_2001,statutory_2011,schools\n";

// Three valid rows: one meeting every threshold, two not.
inline std::string toy_csv() {
  return std::string(kToyHeader) +
         "A1,S1,D1,6000,10,0.80,0.7,0.4,0.1,0.05,1,12\n"
         "A2,S1,D1,4000,20,0.60,0.6,0.3,0.2,0.10,0,3\n"
         "A3,S1,D2,5000,12.5,0.75,0.5,0.35,0.15,0.0,0,NA\n";
}

inline frontier_rd::data::Settlement settlement(std::string id, std::string district,
                                                std::int64_t pop, double density, double nonag,
                                                bool statutory = false) {
  frontier_rd::data::Settlement s;
  s.settlement_id = std::move(id);
  s.state_id = "S1";
  s.district_id = std::move(district);
  s.population_2001 = pop;
  s.area_2001 = static_cast<double>(pop) / density;
  s.density_2001 = frontier_rd::data::compute_density(pop, s.area_2001);
  s.nonag_male_share_2001 = nonag;
  s.literacy_rate_2001 = 0.5;
  s.main_worker_rate_2001 = 0.3;
  s.sc_share_2001 = 0.1;
  s.st_share_2001 = 0.1;
  s.statutory_2011 = statutory;
  s.ct_2001 = frontier_rd::data::Thresholds{}.meets_all(s);
  return s;
}

// Random settlements scattered around the cutoffs, including exact ties.
inline std::vector<frontier_rd::data::Settlement> random_settlements(std::size_t n,
                                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pop(1, 12000), district(1, 25);
  std::uniform_real_distribution<double> dens(10, 900), share(0.3, 1.0), u(0, 1);
  std::vector<frontier_rd::data::Settlement> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t p = pop(rng);
    double d = dens(rng);
    double s = share(rng);
    if (u(rng) < 0.05) p = 5000;
    if (u(rng) < 0.05) d = 400;
    if (u(rng) < 0.05) s = 0.75;
    auto row = settlement("R" + std::to_string(i), "D" + std::to_string(district(rng)), p, d, s,
                          u(rng) < 0.2);
    row.density_2001 = d;  // exact tie values, not area round trips
    row.ct_2001 = frontier_rd::data::Thresholds{}.meets_all(row);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace fixtures
