#include "frontier_rd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "frontier_rd/error.hpp"

namespace frontier_rd::diag {

FirstStageDiagnostics first_stage(const design::Panel& panel, const models::ModelOptions& opts,
                                  bool local) {
  const linreg::Problem p = models::assemble(panel, models::first_stage_spec(opts, local));
  FirstStageDiagnostics out;
  out.fit = linreg::ols(p);
  out.coef = out.fit.coef(models::kInstrument);
  out.se = out.fit.se(models::kInstrument);
  const double t = out.coef / out.se;
  out.f_stat = t * t;
  out.partial_r2 = linreg::partial_r2(p);
  out.adj_r2 = out.fit.adj_r2;
  out.n_obs = out.fit.n_obs;
  out.n_clusters = out.fit.n_clusters;
  return out;
}

linreg::FitResult main_effect(const design::Panel& panel, const models::ModelOptions& opts,
                              const std::string& outcome, bool local) {
  return linreg::tsls(models::assemble(panel, models::main_effect_spec(opts, outcome, local)));
}

linreg::FitResult direct_effect(const design::Panel& panel, const models::ModelOptions& opts,
                                const std::string& outcome, bool local) {
  return linreg::ols(models::assemble(panel, models::direct_effect_spec(opts, outcome, local)));
}

// ---------------------------------------------------------------------------
// Density test

namespace {

// Triangular rule-of-thumb constant for the boundary local linear smoother.
constexpr double kBandwidthConstant = 3.348;
// Asymptotic variance constant of the boundary estimate, triangular kernel.
constexpr double kBoundaryVariance = 24.0 / 5.0;

struct Side {
  std::vector<double> dist;    // bin midpoint - cutoff
  std::vector<double> height;  // normalized count
};

// Weighted least squares of height on dist, evaluated at dist = 0.
// `skip` excludes one bin (jackknife).
std::optional<double> boundary_fit(const Side& s, double h, std::ptrdiff_t skip = -1) {
  double sw = 0, swx = 0, swxx = 0, swy = 0, swxy = 0;
  int used = 0;
  for (std::size_t j = 0; j < s.dist.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) == skip) continue;
    const double w = 1.0 - std::abs(s.dist[j]) / h;
    if (w <= 0.0) continue;
    ++used;
    sw += w;
    swx += w * s.dist[j];
    swxx += w * s.dist[j] * s.dist[j];
    swy += w * s.height[j];
    swxy += w * s.dist[j] * s.height[j];
  }
  const double det = sw * swxx - swx * swx;
  if (used < 2 || !(det > 0.0)) return std::nullopt;
  return (swxx * swy - swx * swxy) / det;
}

// Quartic pilot fit on one side; returns the side's rule-of-thumb bandwidth.
double pilot_bandwidth(const Side& s) {
  const auto m = static_cast<Eigen::Index>(s.dist.size());
  if (m < 6) {
    throw DegenerateSupportError("density test: too few histogram bins on one side for the "
                                 "bandwidth pilot (need 6)");
  }
  double scale = 0.0;
  for (double d : s.dist) scale = std::max(scale, std::abs(d));
  Eigen::MatrixXd a(m, 5);
  Eigen::VectorXd y(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = s.dist[j] / scale;
    double pw = 1.0;
    for (int k = 0; k < 5; ++k) {
      a(j, k) = pw;
      pw *= t;
    }
    y(j) = s.height[j];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
  const double mse = (y - a * coef).squaredNorm() / static_cast<double>(m - 5);
  double curvature = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = s.dist[j] / scale;
    const double f2 = (2.0 * coef(2) + 6.0 * coef(3) * t + 12.0 * coef(4) * t * t) / (scale * scale);
    curvature += f2 * f2;
  }
  // Distance from the cutoff to the outermost bin midpoint.
  const double extent = scale;
  return kBandwidthConstant * std::pow(mse * extent / curvature, 0.2);
}

}  // namespace

DensityTestResult mccrary_test(std::span<const double> running, double cutoff,
                               const DensityTestOptions& options) {
  std::vector<double> x;
  x.reserve(running.size());
  for (double v : running) {
    if (std::isfinite(v)) x.push_back(v);
  }
  DensityTestResult out;
  out.cutoff = cutoff;
  out.variance = options.variance;
  for (double v : x) (v < cutoff ? out.n_left : out.n_right)++;
  if (out.n_left == 0 || out.n_right == 0) {
    throw DegenerateSupportError("density test: all mass on one side of the cutoff");
  }
  if (out.n_left < kDensityMinPerSide || out.n_right < kDensityMinPerSide) {
    out.warnings.push_back("fewer than " + std::to_string(kDensityMinPerSide) +
                           " observations on one side of the cutoff (" +
                           std::to_string(out.n_left) + " left, " + std::to_string(out.n_right) +
                           " right)");
  }

  const auto n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double b = options.bin_width.value_or(2.0 * sd / std::sqrt(n));
  if (!(b > 0.0) || !std::isfinite(b)) throw DegenerateSupportError("density test: zero bin width");
  out.bin_width = b;

  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const auto k_min = static_cast<long long>(std::floor((*lo_it - cutoff) / b));
  const auto k_max = static_cast<long long>(std::floor((*hi_it - cutoff) / b));
  const long long n_bins = k_max - k_min + 1;
  if (n_bins > 50'000'000) throw DegenerateSupportError("density test: bin width too small");
  std::vector<double> counts(static_cast<std::size_t>(n_bins), 0.0);
  for (double v : x) {
    auto k = static_cast<long long>(std::floor((v - cutoff) / b));
    // floor can land one bin low for points a rounding error below an edge.
    if (v >= cutoff && k < 0) k = 0;
    ++counts[static_cast<std::size_t>(k - k_min)];
  }

  Side left, right;
  out.bin_midpoints.reserve(counts.size());
  out.bin_heights.reserve(counts.size());
  for (long long k = k_min; k <= k_max; ++k) {
    const double dist = (static_cast<double>(k) + 0.5) * b;
    const double height = counts[static_cast<std::size_t>(k - k_min)] / (n * b);
    out.bin_midpoints.push_back(cutoff + dist);
    out.bin_heights.push_back(height);
    Side& s = k < 0 ? left : right;
    s.dist.push_back(dist);
    s.height.push_back(height);
  }

  double h = 0.0;
  if (options.bandwidth) {
    h = *options.bandwidth;
  } else {
    h = 0.5 * (pilot_bandwidth(left) + pilot_bandwidth(right));
    // A flat pilot gives an unbounded rule-of-thumb; the kernel window
    // cannot usefully extend past the data on either side.
    const double reach = std::min(cutoff - *lo_it, *hi_it - cutoff);
    if (!std::isfinite(h) || h > reach) h = reach;
  }
  if (!(h > 0.0)) throw DegenerateSupportError("density test: non-positive bandwidth");
  out.bandwidth_used = h;

  const auto fl = boundary_fit(left, h);
  const auto fr = boundary_fit(right, h);
  if (!fl || !fr) {
    throw DegenerateSupportError("density test: insufficient data within the bandwidth");
  }
  if (!(*fl > 0.0) || !(*fr > 0.0)) {
    throw DegenerateSupportError("density test: non-positive boundary density estimate");
  }
  out.density_left = *fl;
  out.density_right = *fr;
  out.log_density_jump = std::log(*fr) - std::log(*fl);

  if (options.variance == DensityVariance::analytic) {
    out.se = std::sqrt(kBoundaryVariance / (n * h) * (1.0 / *fr + 1.0 / *fl));
  } else {
    // Delete-one-bin jackknife over the bins inside the kernel window.
    std::vector<double> thetas;
    auto sweep = [&](const Side& side, bool is_left) {
      for (std::size_t j = 0; j < side.dist.size(); ++j) {
        if (std::abs(side.dist[j]) >= h) continue;
        const auto a = is_left ? boundary_fit(left, h, static_cast<std::ptrdiff_t>(j)) : fl;
        const auto c = is_left ? fr : boundary_fit(right, h, static_cast<std::ptrdiff_t>(j));
        if (a && c && *a > 0.0 && *c > 0.0) thetas.push_back(std::log(*c) - std::log(*a));
      }
    };
    sweep(left, true);
    sweep(right, false);
    if (thetas.size() < 2) throw DegenerateSupportError("density test: jackknife needs 2+ bins");
    const double m = static_cast<double>(thetas.size());
    const double bar = std::accumulate(thetas.begin(), thetas.end(), 0.0) / m;
    double acc = 0.0;
    for (double t : thetas) acc += (t - bar) * (t - bar);
    out.se = std::sqrt((m - 1.0) / m * acc);
  }
  out.t_stat = out.log_density_jump / out.se;
  out.p_value = std::erfc(std::abs(out.t_stat) / std::sqrt(2.0));
  return out;
}

// ---------------------------------------------------------------------------
// Balance

std::vector<std::string> default_balance_variables() {
  return {"log_population",        "log_density",   "nonag_male_share_2001", "literacy_rate_2001",
          "main_worker_rate_2001", "sc_share_2001", "st_share_2001"};
}

std::vector<BalanceRow> balance_table(const design::Panel& panel,
                                      const std::vector<std::string>& variables,
                                      const std::string& group, bool local) {
  const std::vector<double> g = panel.column(group);
  const auto mask = panel.sample_mask(local ? design::SampleFilter::local : design::SampleFilter::all);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask[i] && g[i] != 0.0 && g[i] != 1.0) {
      throw SpecError("balance group '" + group + "' is not a 0/1 indicator");
    }
  }

  std::vector<BalanceRow> rows;
  for (const auto& var : variables) {
    const std::vector<double> v = panel.column(var);
    double sum[2] = {0, 0};
    std::size_t cnt[2] = {0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!mask[i] || !std::isfinite(v[i])) continue;
      const int k = g[i] == 1.0 ? 1 : 0;
      sum[k] += v[i];
      ++cnt[k];
    }
    double mean[2], ss[2] = {0, 0};
    for (int k = 0; k < 2; ++k) mean[k] = cnt[k] ? sum[k] / static_cast<double>(cnt[k]) : std::nan("");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!mask[i] || !std::isfinite(v[i])) continue;
      const int k = g[i] == 1.0 ? 1 : 0;
      ss[k] += (v[i] - mean[k]) * (v[i] - mean[k]);
    }
    auto sd = [&](int k) {
      return cnt[k] > 1 ? std::sqrt(ss[k] / static_cast<double>(cnt[k] - 1)) : std::nan("");
    };
    BalanceRow r;
    r.variable = var;
    r.mean_control = mean[0];
    r.sd_control = sd(0);
    r.mean_treated = mean[1];
    r.sd_treated = sd(1);
    r.n_control = cnt[0];
    r.n_treated = cnt[1];
    r.n = cnt[0] + cnt[1];
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Exclusion restriction

std::vector<ExclusionRow> exclusion_check(const design::Panel& panel,
                                          const models::ModelOptions& opts,
                                          const std::vector<std::string>& outcomes, bool local) {
  std::vector<ExclusionRow> rows;
  for (const auto& outcome : outcomes) {
    const auto main = main_effect(panel, opts, outcome, local);
    const auto direct = direct_effect(panel, opts, outcome, local);
    ExclusionRow r;
    r.outcome = outcome;
    r.main_coef = main.coef(models::kTreatment);
    r.main_se = main.se(models::kTreatment);
    r.main_p = main.p_value(models::kTreatment);
    r.main_n = main.n_obs;
    r.direct_coef = direct.coef(models::kInstrument);
    r.direct_se = direct.se(models::kInstrument);
    r.direct_p = direct.p_value(models::kInstrument);
    r.direct_n = direct.n_obs;
    r.ratio = std::abs(r.direct_coef / r.main_coef);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Binned scatter

double PolynomialFit::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

struct Point {
  double x;
  double y;
};

PolynomialFit fit_polynomial(const std::vector<Point>& pts, int degree) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  if (m <= degree) {
    throw BinCountError("binned_scatter: " + std::to_string(m) + " points cannot fit degree " +
                        std::to_string(degree));
  }
  Eigen::MatrixXd a(m, degree + 1);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double pw = 1.0;
    for (int k = 0; k <= degree; ++k) {
      a(i, k) = pw;
      pw *= pts[i].x;
    }
    y(i) = pts[i].y;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.rows(), a.cols());
  qr.setThreshold(linreg::kRankTolerance);
  qr.compute(a);
  if (qr.rank() < a.cols()) {
    throw RankError("binned_scatter: too few distinct x values for a degree-" +
                    std::to_string(degree) + " fit");
  }
  const Eigen::VectorXd c = qr.solve(y);
  return PolynomialFit{std::vector<double>(c.data(), c.data() + c.size())};
}

// Equal-count split of sorted points into at most n_bins bins, moving each
// boundary forward past ties. Returns bin start offsets plus the end.
std::vector<std::size_t> split_points(const std::vector<Point>& pts, int n_bins) {
  const std::size_t m = pts.size();
  std::vector<std::size_t> starts{0};
  for (int b = 1; b < n_bins; ++b) {
    std::size_t pos = static_cast<std::size_t>(b) * m / static_cast<std::size_t>(n_bins);
    while (pos < m && pos > 0 && pts[pos].x == pts[pos - 1].x) ++pos;
    if (pos > starts.back() && pos < m) starts.push_back(pos);
  }
  starts.push_back(m);
  return starts;
}

}  // namespace

BinnedSeries binned_scatter(std::span<const double> x, std::span<const double> y, int n_bins,
                            int fit_degree) {
  if (x.size() != y.size()) throw InputError("binned_scatter: x and y differ in length");
  if (n_bins < 2) throw BinCountError("binned_scatter: n_bins must be at least 2");
  std::vector<Point> left, right;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    (x[i] < 0.0 ? left : right).push_back({x[i], y[i]});
  }
  const auto need = static_cast<std::size_t>(n_bins);
  if (left.size() < need || right.size() < need) {
    throw BinCountError("binned_scatter: fewer points than bins on one side of 0 (" +
                        std::to_string(left.size()) + " left, " + std::to_string(right.size()) +
                        " right, " + std::to_string(n_bins) + " bins)");
  }
  auto by_x = [](const Point& a, const Point& b) { return a.x < b.x; };
  std::stable_sort(left.begin(), left.end(), by_x);
  std::stable_sort(right.begin(), right.end(), by_x);

  BinnedSeries out;
  auto emit_side = [&](const std::vector<Point>& pts, double lower, double upper) {
    const auto starts = split_points(pts, n_bins);
    if (out.bin_edges.empty()) out.bin_edges.push_back(lower);
    for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
      double sx = 0.0, sy = 0.0;
      for (std::size_t i = starts[b]; i < starts[b + 1]; ++i) {
        sx += pts[i].x;
        sy += pts[i].y;
      }
      const auto cnt = starts[b + 1] - starts[b];
      out.bin_centers.push_back(sx / static_cast<double>(cnt));
      out.bin_means.push_back(sy / static_cast<double>(cnt));
      out.bin_counts.push_back(cnt);
      double edge = upper;
      if (b + 2 < starts.size()) edge = 0.5 * (pts[starts[b + 1] - 1].x + pts[starts[b + 1]].x);
      if (!(edge > out.bin_edges.back())) {
        edge = std::nextafter(out.bin_edges.back(), std::numeric_limits<double>::infinity());
      }
      out.bin_edges.push_back(edge);
    }
  };
  emit_side(left, left.front().x, 0.0);
  emit_side(right, 0.0, right.back().x);

  if (fit_degree >= 0) {
    out.fitted_left = fit_polynomial(left, fit_degree);
    out.fitted_right = fit_polynomial(right, fit_degree);
  }
  return out;
}

}  // namespace frontier_rd::diag
