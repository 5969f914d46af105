#pragma once

// Reference computations for the tests. Deliberately naive: explicit dummy
// columns, normal equations, Gauss-Jordan in long double, no Eigen.

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<long double>>;  // row-major
using Vector = std::vector<long double>;

inline Matrix inverse(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, Vector(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (std::fabs(a[piv][c]) < 1e-300L) throw std::runtime_error("oracle: singular matrix");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const long double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0L) continue;
      const long double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

struct OlsResult {
  Vector beta;
  Vector residuals;
  Matrix vcov;  // cluster-robust with G/(G-1)*(N-1)/(N-K)
  long double ssr = 0;
};

/// Least squares of y on the given columns plus one dummy per distinct
/// `fe` value (no intercept when fe is non-empty, else an intercept column
/// is appended). beta/vcov cover the non-dummy columns first, then dummies.
inline OlsResult dummy_ols(const std::vector<double>& y, const std::vector<std::vector<double>>& cols,
                           const std::vector<int>& fe, const std::vector<int>& cluster) {
  const std::size_t n = y.size();
  std::vector<std::vector<long double>> x;
  for (const auto& c : cols) x.emplace_back(c.begin(), c.end());
  if (fe.empty()) {
    x.emplace_back(n, 1.0L);
  } else {
    std::map<int, std::size_t> level;
    for (int g : fe) level.emplace(g, 0);
    std::size_t j = 0;
    for (auto& [g, idx] : level) idx = j++;
    const std::size_t base = x.size();
    x.resize(base + level.size(), std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) x[base + level[fe[i]]][i] = 1.0L;
  }
  const std::size_t k = x.size();
  Matrix xtx(k, Vector(k, 0.0L));
  Vector xty(k, 0.0L);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      long double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += x[a][i] * x[b][i];
      xtx[a][b] = s;
    }
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[a][i] * y[i];
    xty[a] = s;
  }
  const Matrix bread = inverse(xtx);
  OlsResult r;
  r.beta.assign(k, 0.0L);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) r.beta[a] += bread[a][b] * xty[b];
  }
  r.residuals.assign(n, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    long double fit = 0;
    for (std::size_t a = 0; a < k; ++a) fit += x[a][i] * r.beta[a];
    r.residuals[i] = y[i] - fit;
    r.ssr += r.residuals[i] * r.residuals[i];
  }
  std::map<int, Vector> score;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = score[cluster[i]];
    s.resize(k, 0.0L);
    for (std::size_t a = 0; a < k; ++a) s[a] += x[a][i] * r.residuals[i];
  }
  Matrix meat(k, Vector(k, 0.0L));
  for (const auto& [g, s] : score) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) meat[a][b] += s[a] * s[b];
    }
  }
  const long double G = static_cast<long double>(score.size());
  const long double N = static_cast<long double>(n);
  const long double factor = G / (G - 1.0L) * (N - 1.0L) / (N - static_cast<long double>(k));
  r.vcov.assign(k, Vector(k, 0.0L));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      long double s = 0;
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) s += bread[a][c] * meat[c][d] * bread[d][b];
      }
      r.vcov[a][b] = factor * s;
    }
  }
  return r;
}

/// Just-identified IV with explicit dummies: regressors [endog, cols, D],
/// instruments [instr, cols, D] (intercept instead of D when fe is empty).
/// beta = (Z'X)^-1 Z'y; cluster sandwich with the same small-sample factor.
inline OlsResult dummy_iv(const std::vector<double>& y, const std::vector<double>& endog,
                          const std::vector<double>& instr,
                          const std::vector<std::vector<double>>& cols, const std::vector<int>& fe,
                          const std::vector<int>& cluster) {
  const std::size_t n = y.size();
  std::vector<std::vector<long double>> shared;
  for (const auto& c : cols) shared.emplace_back(c.begin(), c.end());
  if (fe.empty()) {
    shared.emplace_back(n, 1.0L);
  } else {
    std::map<int, std::size_t> level;
    for (int g : fe) level.emplace(g, 0);
    std::size_t j = 0;
    for (auto& [g, idx] : level) idx = j++;
    const std::size_t base = shared.size();
    shared.resize(base + level.size(), std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) shared[base + level[fe[i]]][i] = 1.0L;
  }
  std::vector<std::vector<long double>> x{std::vector<long double>(endog.begin(), endog.end())};
  std::vector<std::vector<long double>> z{std::vector<long double>(instr.begin(), instr.end())};
  x.insert(x.end(), shared.begin(), shared.end());
  z.insert(z.end(), shared.begin(), shared.end());
  const std::size_t k = x.size();
  Matrix zx(k, Vector(k, 0.0L));
  Vector zy(k, 0.0L);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      long double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += z[a][i] * x[b][i];
      zx[a][b] = s;
    }
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += z[a][i] * y[i];
    zy[a] = s;
  }
  const Matrix inv = inverse(zx);
  OlsResult r;
  r.beta.assign(k, 0.0L);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) r.beta[a] += inv[a][b] * zy[b];
  }
  r.residuals.assign(n, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    long double fit = 0;
    for (std::size_t a = 0; a < k; ++a) fit += x[a][i] * r.beta[a];
    r.residuals[i] = y[i] - fit;
    r.ssr += r.residuals[i] * r.residuals[i];
  }
  std::map<int, Vector> score;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = score[cluster[i]];
    s.resize(k, 0.0L);
    for (std::size_t a = 0; a < k; ++a) s[a] += z[a][i] * r.residuals[i];
  }
  Matrix meat(k, Vector(k, 0.0L));
  for (const auto& [g, s] : score) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) meat[a][b] += s[a] * s[b];
    }
  }
  const long double G = static_cast<long double>(score.size());
  const long double N = static_cast<long double>(n);
  const long double factor = G / (G - 1.0L) * (N - 1.0L) / (N - static_cast<long double>(k));
  r.vcov.assign(k, Vector(k, 0.0L));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      long double s = 0;
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) s += inv[a][c] * meat[c][d] * inv[b][d];
      }
      r.vcov[a][b] = factor * s;
    }
  }
  return r;
}

/// Partial R^2 of `instr` for `target` given cols and dummies, from the two
/// residual sums of squares: (SSR_restricted - SSR_full) / SSR_restricted.
inline double restricted_partial_r2(const std::vector<double>& target,
                                    const std::vector<double>& instr,
                                    const std::vector<std::vector<double>>& cols,
                                    const std::vector<int>& fe, const std::vector<int>& cluster) {
  const auto restricted = dummy_ols(target, cols, fe, cluster);
  auto with_z = cols;
  with_z.insert(with_z.begin(), instr);
  const auto full = dummy_ols(target, with_z, fe, cluster);
  return static_cast<double>((restricted.ssr - full.ssr) / restricted.ssr);
}

/// Sample mean and variance (n - 1) by Welford's update.
struct Welford {
  std::size_t n = 0;
  long double mean = 0, m2 = 0;
  void add(double v) {
    ++n;
    const long double d = v - mean;
    mean += d / static_cast<long double>(n);
    m2 += d * (v - mean);
  }
  double sd() const { return n > 1 ? static_cast<double>(std::sqrt(m2 / (n - 1))) : 0.0; }
};

}  // namespace oracle
