#pragma once

#include <random>
#include <string>
#include <vector>

#include "frontier_rd/linreg.hpp"

namespace instances {

// Small fuzzy-IV regression instance with fixed-effect groups nested in
// clusters. Every FE group has at least two rows, so nothing is dropped.
struct Instance {
  std::vector<double> y, d, z;
  std::vector<std::vector<double>> cols;
  std::vector<int> fe, cluster;

  frontier_rd::linreg::Problem problem(bool with_fe, bool with_endog, bool with_instr) const {
    using namespace frontier_rd::linreg;
    const auto n = static_cast<Eigen::Index>(y.size());
    Problem p;
    p.outcome = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    if (with_endog) {
      p.endogenous_name = "d";
      p.endogenous = Eigen::Map<const Eigen::VectorXd>(d.data(), n);
    }
    if (with_instr) {
      p.instrument_name = "z";
      p.instrument = Eigen::Map<const Eigen::VectorXd>(z.data(), n);
    }
    p.controls.resize(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      p.control_names.push_back("x" + std::to_string(j + 1));
      for (Eigen::Index i = 0; i < n; ++i) p.controls(i, static_cast<Eigen::Index>(j)) = cols[j][i];
    }
    std::vector<long long> f(fe.begin(), fe.end()), c(cluster.begin(), cluster.end());
    if (with_fe) p.fixed_effect = GroupIndex::from_codes(f);
    p.cluster = GroupIndex::from_codes(c);
    return p;
  }
};

inline Instance random_instance(std::mt19937_64& rng, int n, int k, int n_fe, int fe_per_cluster) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n_fe - 1);
  Instance in;
  in.fe.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) in.fe[static_cast<std::size_t>(i)] = i < 2 * n_fe ? i % n_fe : pick(rng);
  for (int f : in.fe) in.cluster.push_back(f / fe_per_cluster);
  std::vector<double> alpha(static_cast<std::size_t>(n_fe));
  for (double& a : alpha) a = 2.0 * g(rng);
  in.cols.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(n)));
  std::bernoulli_distribution coin(0.4);
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double a = alpha[static_cast<std::size_t>(in.fe[u])];
    for (int j = 0; j < k; ++j) in.cols[static_cast<std::size_t>(j)][u] = g(rng) + 0.3 * a;
    const double zv = coin(rng) ? 1.0 : 0.0;
    const double v = g(rng);
    const double dv = 0.7 * zv + 0.2 * a + (k > 0 ? 0.3 * in.cols[0][u] : 0.0) + v;
    const double e = 0.5 * v + g(rng);
    in.z.push_back(zv);
    in.d.push_back(dv);
    double yv = 1.5 * dv + a + e;
    for (int j = 0; j < k; ++j) yv += 0.2 * (j + 1) * in.cols[static_cast<std::size_t>(j)][u];
    in.y.push_back(yv);
  }
  return in;
}

}  // namespace instances
