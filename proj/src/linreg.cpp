#include "frontier_rd/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "frontier_rd/error.hpp"

namespace frontier_rd::linreg {

// ---------------------------------------------------------------------------
// GroupIndex

GroupIndex GroupIndex::from_keys(std::span<const std::string> keys) {
  std::unordered_map<std::string_view, int> code;
  for (const auto& k : keys) {
    if (k.empty()) throw InputError("empty group key");
    code.emplace(k, 0);
  }
  std::vector<std::string_view> sorted;
  sorted.reserve(code.size());
  for (const auto& [k, _] : code) sorted.push_back(k);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < sorted.size(); ++j) code[sorted[j]] = static_cast<int>(j);

  GroupIndex g;
  g.ids_.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) g.ids_[i] = code.find(keys[i])->second;
  g.n_groups_ = static_cast<int>(sorted.size());
  return g;
}

GroupIndex GroupIndex::from_codes(std::span<const long long> codes) {
  std::vector<long long> sorted(codes.begin(), codes.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  GroupIndex g;
  g.ids_.resize(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    g.ids_[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), codes[i]) -
                                 sorted.begin());
  }
  g.n_groups_ = static_cast<int>(sorted.size());
  return g;
}

GroupIndex GroupIndex::subset(const std::vector<bool>& keep) const {
  std::vector<int> remap(static_cast<std::size_t>(n_groups_), -1);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (keep[i]) remap[static_cast<std::size_t>(ids_[i])] = 0;
  }
  int next = 0;
  for (auto& r : remap) {
    if (r == 0) r = next++;
  }
  GroupIndex g;
  g.ids_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (keep[i]) g.ids_.push_back(remap[static_cast<std::size_t>(ids_[i])]);
  }
  g.n_groups_ = next;
  return g;
}

// ---------------------------------------------------------------------------
// Within transformation

WithinResult within_transform(const Eigen::MatrixXd& values, const GroupIndex& groups) {
  if (static_cast<Eigen::Index>(groups.size()) != values.rows()) {
    throw InputError("within_transform: group vector length does not match rows");
  }
  const int G = groups.n_groups();
  std::vector<int> counts(static_cast<std::size_t>(G), 0);
  for (int id : groups.ids()) ++counts[static_cast<std::size_t>(id)];

  WithinResult out;
  out.values = values;
  out.n_groups = G;
  out.n_singleton_groups = static_cast<int>(std::count(counts.begin(), counts.end(), 1));
  out.singleton.resize(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) out.singleton[i] = counts[groups.ids()[i]] == 1;

  // Two sweeps: the second removes the rounding left by the first.
  Eigen::MatrixXd sums(G, values.cols());
  for (int sweep = 0; sweep < 2; ++sweep) {
    sums.setZero();
    for (Eigen::Index i = 0; i < values.rows(); ++i) sums.row(groups.id(i)) += out.values.row(i);
    for (int g = 0; g < G; ++g) {
      if (counts[g] > 0) sums.row(g) /= static_cast<double>(counts[g]);
    }
    for (Eigen::Index i = 0; i < values.rows(); ++i) out.values.row(i) -= sums.row(groups.id(i));
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    if (out.singleton[static_cast<std::size_t>(i)]) out.values.row(i).setZero();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sample preparation

namespace {

struct Prepared {
  Eigen::VectorXd y;
  Eigen::VectorXd d;
  Eigen::VectorXd z;
  Eigen::MatrixXd x;  // controls, plus intercept without fixed effects
  std::vector<std::string> x_names;
  GroupIndex cluster;
  int n_obs = 0;
  int n_fe_groups = 0;
  bool has_fe = false;
  double sst = 0.0;
  double sst_within = 0.0;
  int dropped_missing = 0;
  int dropped_singletons = 0;
};

Prepared prepare(const Problem& p, bool use_d, bool use_z) {
  const Eigen::Index n = p.outcome.size();
  auto check_len = [&](Eigen::Index len, const char* what) {
    if (len != n) throw InputError(std::string("regression input: ") + what + " length mismatch");
  };
  if (use_d) check_len(p.endogenous.size(), "endogenous");
  if (use_z) check_len(p.instrument.size(), "instrument");
  if (p.controls.cols() > 0) check_len(p.controls.rows(), "controls");
  if (static_cast<Eigen::Index>(p.control_names.size()) != p.controls.cols()) {
    throw InputError("regression input: control names do not match control columns");
  }
  check_len(static_cast<Eigen::Index>(p.cluster.size()), "cluster");
  if (p.fixed_effect) check_len(static_cast<Eigen::Index>(p.fixed_effect->size()), "fixed effect");

  std::vector<bool> keep(static_cast<std::size_t>(n), true);
  Prepared out;
  out.dropped_missing = p.dropped_missing;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool ok = std::isfinite(p.outcome(i));
    if (use_d) ok = ok && std::isfinite(p.endogenous(i));
    if (use_z) ok = ok && std::isfinite(p.instrument(i));
    for (Eigen::Index j = 0; ok && j < p.controls.cols(); ++j) ok = std::isfinite(p.controls(i, j));
    if (!ok) {
      keep[static_cast<std::size_t>(i)] = false;
      ++out.dropped_missing;
    }
  }

  if (p.fixed_effect) {
    std::vector<int> counts(static_cast<std::size_t>(p.fixed_effect->n_groups()), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (keep[static_cast<std::size_t>(i)]) ++counts[p.fixed_effect->id(i)];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (keep[static_cast<std::size_t>(i)] && counts[p.fixed_effect->id(i)] == 1) {
        keep[static_cast<std::size_t>(i)] = false;
        ++out.dropped_singletons;
      }
    }
  }

  const Eigen::Index k = p.controls.cols();
  const Eigen::Index width = 1 + (use_d ? 1 : 0) + (use_z ? 1 : 0) + k;
  const auto m = static_cast<Eigen::Index>(std::count(keep.begin(), keep.end(), true));
  Eigen::MatrixXd M(m, width);
  for (Eigen::Index i = 0, r = 0; i < n; ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    Eigen::Index c = 0;
    M(r, c++) = p.outcome(i);
    if (use_d) M(r, c++) = p.endogenous(i);
    if (use_z) M(r, c++) = p.instrument(i);
    for (Eigen::Index j = 0; j < k; ++j) M(r, c++) = p.controls(i, j);
    ++r;
  }
  out.n_obs = static_cast<int>(m);
  if (m == 0) throw EmptyInputError("regression sample is empty");

  const double ybar = M.col(0).mean();
  out.sst = (M.col(0).array() - ybar).square().sum();

  out.x_names = p.control_names;
  if (p.fixed_effect) {
    const GroupIndex fe = p.fixed_effect->subset(keep);
    out.has_fe = true;
    out.n_fe_groups = fe.n_groups();
    M = within_transform(M, fe).values;
    out.sst_within = M.col(0).squaredNorm();
  } else {
    out.sst_within = out.sst;
  }

  Eigen::Index c = 0;
  out.y = M.col(c++);
  if (use_d) out.d = M.col(c++);
  if (use_z) out.z = M.col(c++);
  if (p.fixed_effect) {
    out.x = M.rightCols(k);
  } else {
    out.x.resize(m, k + 1);
    out.x.leftCols(k) = M.rightCols(k);
    out.x.col(k).setOnes();
    out.x_names.emplace_back("(Intercept)");
  }
  out.cluster = p.cluster.subset(keep);
  return out;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) {
    if (!s.empty()) s += ", ";
    s += n;
  }
  return s;
}

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_checked_qr(const Eigen::MatrixXd& w,
                                                            const std::vector<std::string>& names) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w.rows(), w.cols());
  qr.setThreshold(kRankTolerance);
  qr.compute(w);
  if (qr.rank() < w.cols()) {
    std::vector<std::string> collinear;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < w.cols(); ++j) collinear.push_back(names[perm(j)]);
    std::sort(collinear.begin(), collinear.end());
    throw RankError("rank-deficient design; collinear columns: " + join_names(collinear));
  }
  return qr;
}

// Scores summed within clusters, in cluster-id order, rows in input order.
Eigen::MatrixXd cluster_meat(const Eigen::MatrixXd& instruments, const Eigen::VectorXd& resid,
                             const GroupIndex& cluster) {
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(cluster.n_groups(), instruments.cols());
  for (Eigen::Index i = 0; i < instruments.rows(); ++i) {
    scores.row(cluster.id(i)) += instruments.row(i) * resid(i);
  }
  return scores.transpose() * scores;
}

void check_inference(const Prepared& s, int dof_model) {
  if (s.cluster.n_groups() < 2) {
    throw InferenceError("cluster-robust inference needs at least 2 clusters, found " +
                         std::to_string(s.cluster.n_groups()));
  }
  if (s.n_obs <= dof_model) {
    throw InferenceError("not enough observations: " + std::to_string(s.n_obs) + " for " +
                         std::to_string(dof_model) + " parameters");
  }
}

void finish(FitResult& f, const Prepared& s, const Eigen::VectorXd& resid) {
  f.n_obs = s.n_obs;
  f.n_clusters = s.cluster.n_groups();
  f.n_fe_groups = s.n_fe_groups;
  f.dof_model = static_cast<int>(f.coefficients.size()) + s.n_fe_groups;
  f.dof_residual = f.n_obs - f.dof_model;
  f.ssr = resid.squaredNorm();
  f.sst = s.sst;
  f.r2 = s.sst > 0.0 ? 1.0 - f.ssr / s.sst : 0.0;
  f.within_r2 = s.sst_within > 0.0 ? 1.0 - f.ssr / s.sst_within : 0.0;
  f.adj_r2 = 1.0 - (1.0 - f.r2) * static_cast<double>(f.n_obs - 1) /
                       static_cast<double>(f.dof_residual);
  f.dropped_missing = s.dropped_missing;
  f.dropped_singletons = s.dropped_singletons;
  const double G = f.n_clusters;
  f.small_sample_factor = G / (G - 1.0) * static_cast<double>(f.n_obs - 1) /
                          static_cast<double>(f.dof_residual);
}

}  // namespace

// ---------------------------------------------------------------------------
// Estimators

FitResult ols(const Problem& p) {
  const bool use_d = p.endogenous_name.has_value();
  const bool use_z = p.instrument_name.has_value();
  const Prepared s = prepare(p, use_d, use_z);

  std::vector<std::string> names;
  if (use_d) names.push_back(*p.endogenous_name);
  if (use_z) names.push_back(*p.instrument_name);
  names.insert(names.end(), s.x_names.begin(), s.x_names.end());
  const auto K = static_cast<Eigen::Index>(names.size());
  if (K == 0) throw InputError("ols: no regressors");

  Eigen::MatrixXd w(s.n_obs, K);
  Eigen::Index c = 0;
  if (use_d) w.col(c++) = s.d;
  if (use_z) w.col(c++) = s.z;
  w.rightCols(s.x.cols()) = s.x;

  check_inference(s, static_cast<int>(K) + s.n_fe_groups);
  const auto qr = rank_checked_qr(w, names);

  FitResult f;
  f.estimator = Estimator::ols;
  f.names = std::move(names);
  f.coefficients = qr.solve(s.y);
  const Eigen::VectorXd resid = s.y - w * f.coefficients;

  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(K, K).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(K, K));
  const Eigen::MatrixXd bread =
      qr.colsPermutation() * (r_inv * r_inv.transpose()) * qr.colsPermutation().transpose();

  finish(f, s, resid);
  const Eigen::MatrixXd meat = cluster_meat(w, resid, s.cluster);
  f.vcov = f.small_sample_factor * bread * meat * bread;
  f.vcov = 0.5 * (f.vcov + f.vcov.transpose()).eval();
  return f;
}

namespace {

struct Partialled {
  Eigen::VectorXd d_perp;
  Eigen::VectorXd z_perp;
};

// Residualizes d and z on the controls, with rank checks on [d, X] and [z, X].
Partialled partial_out(const Prepared& s, const std::string& d_name, const std::string& z_name,
                       std::optional<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>>& qr_x) {
  Partialled out{s.d, s.z};
  if (s.x.cols() > 0) {
    qr_x.emplace(rank_checked_qr(s.x, s.x_names));
    out.d_perp = s.d - s.x * qr_x->solve(s.d);
    out.z_perp = s.z - s.x * qr_x->solve(s.z);
  }
  const auto residual_small = [](const Eigen::VectorXd& perp, const Eigen::VectorXd& raw) {
    return perp.norm() <= kRankTolerance * std::max(raw.norm(), 1e-300);
  };
  if (residual_small(out.d_perp, s.d)) {
    throw RankError("rank-deficient design; collinear columns: " + d_name +
                    " (collinear with controls/fixed effects)");
  }
  if (residual_small(out.z_perp, s.z)) {
    throw RankError("rank-deficient design; collinear columns: " + z_name +
                    " (collinear with controls/fixed effects)");
  }
  return out;
}

}  // namespace

FitResult tsls(const Problem& p) {
  if (!p.endogenous_name || !p.instrument_name) {
    throw InputError("tsls needs exactly one endogenous variable and one instrument");
  }
  const Prepared s = prepare(p, true, true);
  const std::string& d_name = *p.endogenous_name;
  const std::string& z_name = *p.instrument_name;

  std::vector<std::string> names{d_name};
  names.insert(names.end(), s.x_names.begin(), s.x_names.end());
  const auto K = static_cast<Eigen::Index>(names.size());
  check_inference(s, static_cast<int>(K) + s.n_fe_groups);

  std::optional<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>> qr_x;
  const Partialled part = partial_out(s, d_name, z_name, qr_x);

  const double zd = part.z_perp.dot(part.d_perp);
  if (std::abs(zd) <= kDegenerateInstrumentTolerance * part.z_perp.norm() * part.d_perp.norm()) {
    throw DegenerateInstrumentError("instrument '" + z_name +
                                    "' has no first-stage relationship with '" + d_name +
                                    "' after partialling controls");
  }
  const double beta = part.z_perp.dot(s.y) / zd;

  FitResult f;
  f.estimator = Estimator::tsls;
  f.names = std::move(names);
  f.coefficients.resize(K);
  f.coefficients(0) = beta;
  const Eigen::VectorXd y_net = s.y - s.d * beta;
  if (qr_x) f.coefficients.tail(K - 1) = qr_x->solve(y_net);
  const Eigen::VectorXd resid = y_net - s.x * f.coefficients.tail(K - 1);

  Eigen::MatrixXd w(s.n_obs, K), q(s.n_obs, K);
  w.col(0) = s.d;
  q.col(0) = s.z;
  w.rightCols(K - 1) = s.x;
  q.rightCols(K - 1) = s.x;
  const Eigen::MatrixXd a = q.transpose() * w;
  const Eigen::MatrixXd a_inv = a.fullPivLu().inverse();

  finish(f, s, resid);
  const Eigen::MatrixXd meat = cluster_meat(q, resid, s.cluster);
  f.vcov = f.small_sample_factor * a_inv * meat * a_inv.transpose();
  f.vcov = 0.5 * (f.vcov + f.vcov.transpose()).eval();
  return f;
}

double partial_r2(const Problem& p) {
  if (!p.instrument_name) throw InputError("partial_r2 needs an instrument");
  // Treat the treatment as "d" so the shared partialling path applies.
  Problem q = p;
  if (!p.endogenous_name) {
    q.endogenous_name = p.outcome_name;
    q.endogenous = p.outcome;
  }
  const Prepared s = prepare(q, true, true);
  std::optional<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>> qr_x;
  const Partialled part = partial_out(s, *q.endogenous_name, *q.instrument_name, qr_x);
  const double zd = part.z_perp.dot(part.d_perp);
  return zd * zd / (part.z_perp.squaredNorm() * part.d_perp.squaredNorm());
}

// ---------------------------------------------------------------------------
// FitResult accessors

std::size_t FitResult::index(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw SpecError("no coefficient named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double FitResult::coef(std::string_view name) const {
  return coefficients(static_cast<Eigen::Index>(index(name)));
}

double FitResult::se(std::string_view name) const {
  const auto i = static_cast<Eigen::Index>(index(name));
  return std::sqrt(std::max(vcov(i, i), 0.0));
}

double FitResult::t_stat(std::string_view name) const { return coef(name) / se(name); }

double FitResult::p_value(std::string_view name) const {
  const double t = t_stat(name);
  if (!std::isfinite(t)) return std::isnan(t) ? t : 0.0;
  const boost::math::students_t dist(std::max(n_clusters - 1, 1));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double FitResult::critical_value(double level) const {
  const boost::math::students_t dist(std::max(n_clusters - 1, 1));
  return boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
}

std::pair<double, double> FitResult::conf_int(std::string_view name, double level) const {
  const double b = coef(name);
  const double h = critical_value(level) * se(name);
  return {b - h, b + h};
}

}  // namespace frontier_rd::linreg
