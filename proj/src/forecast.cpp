#include "gridshare/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace gridshare {

namespace {

constexpr double kAdfCritical5pct = -2.86;  // constant-only regression, large n

bool is_constant(std::span<const double> s) {
  for (double v : s)
    if (v != s.front()) return false;
  return true;
}

void check_finite(std::span<const double> s) {
  for (double v : s)
    if (!std::isfinite(v)) throw DataError("series must be finite");
}

// Least squares via normal equations with partial pivoting. Columns whose
// pivot collapses are dropped (coefficient pinned to 0). Returns false in
// `kept[j]` for dropped columns. `cov_col` receives column `target` of
// (X'X)^-1 restricted to kept columns, or stays empty if target was dropped.
struct OlsResult {
  std::vector<double> coef;
  std::vector<bool> kept;
  double sse = 0.0;
  int rank = 0;
  double target_var_unit = 0.0;  // (X'X)^-1 diagonal entry for target column
  bool target_kept = false;
};

OlsResult ols(const std::vector<std::vector<double>>& cols, std::span<const double> y, int target) {
  int k = static_cast<int>(cols.size());
  int m = static_cast<int>(y.size());

  // Gram matrix and right-hand side.
  std::vector<std::vector<double>> g(k, std::vector<double>(k));
  std::vector<double> b(k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      double s = 0.0;
      for (int t = 0; t < m; ++t) s += cols[i][t] * cols[j][t];
      g[i][j] = g[j][i] = s;
    }
    double s = 0.0;
    for (int t = 0; t < m; ++t) s += cols[i][t] * y[t];
    b[i] = s;
  }

  // Column scales for the pivot threshold.
  std::vector<double> scale(k);
  for (int i = 0; i < k; ++i) scale[i] = std::max(g[i][i], 1e-30);

  OlsResult r;
  r.coef.assign(k, 0.0);
  r.kept.assign(k, true);

  // Gaussian elimination in column order; e2 carries the unit vector for the
  // target column so its inverse-diagonal entry falls out of the same sweep.
  std::vector<double> e2(k, 0.0);
  if (target >= 0) e2[target] = 1.0;
  std::vector<std::vector<double>> a = g;
  std::vector<double> rhs = b;

  for (int col = 0; col < k; ++col) {
    if (std::abs(a[col][col]) < 1e-10 * scale[col]) {
      r.kept[col] = false;
      // Zero out the column's row and rhs so it drops from the system.
      for (int j = 0; j < k; ++j) {
        a[col][j] = 0.0;
        a[j][col] = 0.0;
      }
      a[col][col] = 1.0;
      rhs[col] = 0.0;
      e2[col] = 0.0;
      continue;
    }
    ++r.rank;
    double inv = 1.0 / a[col][col];
    for (int row = 0; row < k; ++row) {
      if (row == col) continue;
      double f = a[row][col] * inv;
      if (f == 0.0) continue;
      for (int j = col; j < k; ++j) a[row][j] -= f * a[col][j];
      a[row][col] = 0.0;
      rhs[row] -= f * rhs[col];
      e2[row] -= f * e2[col];
    }
  }
  for (int col = 0; col < k; ++col) {
    if (!r.kept[col]) continue;
    r.coef[col] = rhs[col] / a[col][col];
  }
  if (target >= 0 && r.kept[target]) {
    r.target_kept = true;
    r.target_var_unit = e2[target] / a[target][target];
  }

  for (int t = 0; t < m; ++t) {
    double fit = 0.0;
    for (int i = 0; i < k; ++i) fit += r.coef[i] * cols[i][t];
    double res = y[t] - fit;
    r.sse += res * res;
  }
  return r;
}

// theta raw parameters in (-1,1)^k -> stationary AR (or invertible MA)
// coefficients, via the Durbin-Levinson style recursion.
std::vector<double> pacf_to_coeff(std::span<const double> partial) {
  int k = static_cast<int>(partial.size());
  std::vector<double> cur(partial.begin(), partial.end());
  std::vector<double> prev(k);
  std::vector<double> work(k);
  // cur holds phi^(j) after step j; start from phi^(1) = (r_1).
  for (int j = 1; j < k; ++j) {
    for (int i = 0; i < j; ++i) prev[i] = cur[i];
    double r = partial[j];
    for (int i = 0; i < j; ++i) work[i] = prev[i] - r * prev[j - 1 - i];
    for (int i = 0; i < j; ++i) cur[i] = work[i];
    cur[j] = r;
  }
  return cur;
}

struct CssSpec {
  std::span<const double> z;
  int p = 0;
  int q = 0;
  bool has_mean = false;
};

// Residual recursion for z_t - mu = sum phi_i (z_{t-i} - mu) + e_t - sum theta_j e_{t-j},
// conditioning on the first p observations, presample residuals zero.
double css_objective(const CssSpec& spec, std::span<const double> ar, std::span<const double> ma,
                     double mu, std::vector<double>* residuals_out) {
  int n = static_cast<int>(spec.z.size());
  int p = spec.p;
  int q = spec.q;
  std::vector<double> eps(n, 0.0);
  double css = 0.0;
  for (int t = p; t < n; ++t) {
    double pred = mu;
    for (int i = 0; i < p; ++i) pred += ar[i] * (spec.z[t - 1 - i] - mu);
    for (int j = 0; j < q; ++j)
      if (t - 1 - j >= p) pred -= ma[j] * eps[t - 1 - j];
    double e = spec.z[t] - pred;
    eps[t] = e;
    css += e * e;
  }
  if (residuals_out) residuals_out->assign(eps.begin() + p, eps.end());
  return css;
}

// Raw optimizer vector -> (ar, ma, mu).
void unpack(const CssSpec& spec, std::span<const double> x, std::vector<double>& ar,
            std::vector<double>& ma, double& mu) {
  std::vector<double> part(spec.p);
  for (int i = 0; i < spec.p; ++i) part[i] = std::tanh(x[i]);
  ar = spec.p > 0 ? pacf_to_coeff(part) : std::vector<double>{};
  part.resize(spec.q);
  for (int j = 0; j < spec.q; ++j) part[j] = std::tanh(x[spec.p + j]);
  ma = spec.q > 0 ? pacf_to_coeff(part) : std::vector<double>{};
  mu = spec.has_mean ? x[spec.p + spec.q] : 0.0;
}

// Nelder-Mead on an arbitrary objective; returns best point found.
std::vector<double> nelder_mead(std::function<double(std::span<const double>)> f,
                                std::vector<double> x0, std::span<const double> step,
                                int max_iter, double tol) {
  int dim = static_cast<int>(x0.size());
  std::vector<std::vector<double>> pts(dim + 1, x0);
  for (int i = 0; i < dim; ++i) pts[i + 1][i] += step[i];
  std::vector<double> fv(dim + 1);
  for (int i = 0; i <= dim; ++i) fv[i] = f(pts[i]);

  std::vector<int> ord(dim + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    if (fv[ord.back()] - fv[ord.front()] <= tol * (1.0 + std::abs(fv[ord.front()]))) break;

    int worst = ord.back();
    std::vector<double> centroid(dim, 0.0);
    for (int i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (int d = 0; d < dim; ++d) centroid[d] += pts[i][d];
    }
    for (double& c : centroid) c /= dim;

    auto blend = [&](double t) {
      std::vector<double> x(dim);
      for (int d = 0; d < dim; ++d) x[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
      return x;
    };

    std::vector<double> xr = blend(-1.0);
    double fr = f(xr);
    if (fr < fv[ord.front()]) {
      std::vector<double> xe = blend(-2.0);
      double fe = f(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
    } else if (fr < fv[ord[dim - 1]]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
    } else {
      bool outside = fr < fv[worst];
      std::vector<double> xc = blend(outside ? -0.5 : 0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = std::move(xc);
        fv[worst] = fc;
      } else {
        // Shrink toward the best vertex.
        int best = ord.front();
        for (int i = 0; i <= dim; ++i) {
          if (i == best) continue;
          for (int d = 0; d < dim; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return pts[best];
}

}  // namespace

std::vector<double> difference(std::span<const double> series, int d) {
  if (d < 0) throw ConfigError("differencing order must be nonnegative");
  std::vector<double> z(series.begin(), series.end());
  for (int pass = 0; pass < d; ++pass) {
    if (z.size() < 2) throw NumericError("series too short to difference");
    for (std::size_t t = 0; t + 1 < z.size(); ++t) z[t] = z[t + 1] - z[t];
    z.pop_back();
  }
  return z;
}

AdfResult adf_test(std::span<const double> series) {
  check_finite(series);
  int n = static_cast<int>(series.size());
  if (n < 20) throw DataError("series too short for a unit-root test");
  if (is_constant(series)) throw NumericError("unit-root test on a constant series");

  int lag = static_cast<int>(std::floor(std::cbrt(static_cast<double>(n - 1))));
  int m = n - 1 - lag;  // usable rows

  std::vector<double> dy(n - 1);
  for (int t = 0; t + 1 < n; ++t) dy[t] = series[t + 1] - series[t];

  // Columns: intercept, level lag, then lagged differences.
  int k = 2 + lag;
  std::vector<std::vector<double>> cols(k, std::vector<double>(m));
  std::vector<double> y(m);
  for (int row = 0; row < m; ++row) {
    int t = row + lag;  // index into dy
    y[row] = dy[t];
    cols[0][row] = 1.0;
    cols[1][row] = series[t];  // y_{t-1} in level terms
    for (int i = 0; i < lag; ++i) cols[2 + i][row] = dy[t - 1 - i];
  }

  OlsResult fit = ols(cols, y, 1);
  AdfResult out;
  out.lag = lag;
  int dof = m - fit.rank;
  double ssy = 0.0;
  for (double v : y) ssy += v * v;
  bool perfect = fit.sse <= 1e-12 * std::max(ssy, 1e-30);
  if (!fit.target_kept || dof <= 0 || perfect || fit.target_var_unit <= 0.0) {
    out.statistic = 0.0;  // collinear or perfectly fitted regression
  } else {
    double s2 = fit.sse / dof;
    out.statistic = fit.coef[1] / std::sqrt(s2 * fit.target_var_unit);
  }
  out.stationary = out.statistic < kAdfCritical5pct;
  return out;
}

std::vector<double> acf(std::span<const double> series, int max_lag) {
  check_finite(series);
  int n = static_cast<int>(series.size());
  if (max_lag < 0 || 2 * max_lag >= n) throw ConfigError("acf lag out of range");
  double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);
  if (denom <= 0.0) throw NumericError("autocorrelation of a constant series");

  std::vector<double> r(max_lag + 1, 0.0);
  r[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    double s = 0.0;
    for (int t = k; t < n; ++t) s += (series[t] - mean) * (series[t - k] - mean);
    r[k] = s / denom;
  }
  return r;
}

std::vector<double> pacf(std::span<const double> series, int max_lag) {
  std::vector<double> rho = acf(series, max_lag);
  std::vector<double> out(max_lag + 1, 0.0);
  out[0] = 1.0;
  if (max_lag == 0) return out;

  // Durbin-Levinson; phi holds the current-order AR solution.
  std::vector<double> phi(max_lag + 1, 0.0), prev(max_lag + 1, 0.0);
  phi[1] = rho[1];
  out[1] = rho[1];
  double v = 1.0 - rho[1] * rho[1];
  for (int k = 2; k <= max_lag; ++k) {
    for (int i = 1; i < k; ++i) prev[i] = phi[i];
    double num = rho[k];
    for (int i = 1; i < k; ++i) num -= prev[i] * rho[k - i];
    double a = v > 1e-14 ? num / v : 0.0;
    phi[k] = a;
    for (int i = 1; i < k; ++i) phi[i] = prev[i] - a * prev[k - i];
    v *= (1.0 - a * a);
    out[k] = a;
  }
  return out;
}

ArimaOrder select_order(std::span<const double> series) {
  check_finite(series);
  if (series.size() < 50) throw DataError("series too short for order selection");
  ArimaOrder order;
  std::vector<double> z(series.begin(), series.end());
  bool stationary = false;
  for (order.d = 0; order.d <= 2; ++order.d) {
    // A constant (already deterministic) series needs no unit-root test.
    if (is_constant(z) || adf_test(z).stationary) {
      stationary = true;
      break;
    }
    if (order.d < 2) z = difference(z, 1);
  }
  if (!stationary) throw NumericError("no differencing order up to 2 achieves stationarity");
  if (is_constant(z)) return order;  // nothing left to correlate

  int n = static_cast<int>(z.size());
  int max_lag = std::min(5, n / 4);
  if (max_lag < 1) return order;
  double band = 2.0 / std::sqrt(static_cast<double>(n));

  std::vector<double> part = pacf(z, max_lag);
  std::vector<double> corr = acf(z, max_lag);
  for (int k = 1; k <= max_lag; ++k) {
    if (std::abs(part[k]) > band) order.p = k;
    if (std::abs(corr[k]) > band) order.q = k;
  }
  return order;
}

ArimaModel fit_arima(std::span<const double> series, const ArimaOrder& order) {
  check_finite(series);
  if (order.p < 0 || order.d < 0 || order.q < 0 || order.p > 12 || order.d > 2 || order.q > 12)
    throw ConfigError("unsupported model order");

  // Ten observations per estimated coefficient, plus the samples differencing
  // consumes. Shorter inputs give CSS surfaces flat enough to stall the simplex.
  std::size_t need =
      10 * static_cast<std::size_t>(order.p + order.q + 1) + static_cast<std::size_t>(order.d);
  if (series.size() < need)
    throw DataError("series too short for the requested model order");

  std::vector<double> z = difference(series, order.d);
  int n = static_cast<int>(z.size());

  CssSpec spec;
  spec.z = z;
  spec.p = order.p;
  spec.q = order.q;
  spec.has_mean = order.d == 0 || order.p + order.q > 0;

  double zmean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double zsd = 0.0;
  for (double v : z) zsd += (v - zmean) * (v - zmean);
  zsd = std::sqrt(zsd / std::max(1, n - 1));

  int dim = order.p + order.q + (spec.has_mean ? 1 : 0);
  std::vector<double> best_x(dim, 0.0);
  std::vector<double> ar, ma;
  double mu = 0.0;

  if (dim > 0) {
    auto objective = [&](std::span<const double> x) {
      std::vector<double> a, m;
      double c;
      unpack(spec, x, a, m, c);
      double v = css_objective(spec, a, m, c, nullptr);
      return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    std::vector<double> x0(dim, 0.0);
    if (spec.has_mean) x0[dim - 1] = zmean;
    std::vector<double> step(dim, 0.25);
    if (spec.has_mean) step[dim - 1] = zsd > 0.0 ? 0.5 * zsd : 0.5;
    best_x = nelder_mead(objective, std::move(x0), step, 400 * dim + 400, 1e-12);
  }
  unpack(spec, best_x, ar, ma, mu);

  ArimaModel model;
  model.order = order;
  std::vector<double> residuals;
  model.css = css_objective(spec, ar, ma, mu, &residuals);
  if (!std::isfinite(model.css)) throw FitError("conditional sum of squares diverged", model.css);
  model.ar = std::move(ar);
  model.ma = std::move(ma);
  model.has_mean = spec.has_mean;
  model.mean = mu;
  model.n_obs = n;
  int dof = n - order.p - order.q;
  model.sigma2 = dof > 0 ? model.css / dof : 0.0;

  model.diffed_tail.assign(z.end() - order.p, z.end());
  if (order.q > 0) {
    int take = std::min<int>(order.q, static_cast<int>(residuals.size()));
    model.residual_tail.assign(residuals.end() - take, residuals.end());
    while (static_cast<int>(model.residual_tail.size()) < order.q)
      model.residual_tail.insert(model.residual_tail.begin(), 0.0);
  }

  model.integest_anchor.resize(order.d);
  {
    std::vector<double> level(series.begin(), series.end());
    for (int j = 0; j < order.d; ++j) {
      model.integest_anchor[j] = level.back();
      level = difference(level, 1);
    }
  }

  if (!residuals.empty()) {
    int m = static_cast<int>(residuals.size());
    double rm = std::accumulate(residuals.begin(), residuals.end(), 0.0) / m;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double e : residuals) {
      double u = e - rm;
      m2 += u * u;
      m3 += u * u * u;
      m4 += u * u * u * u;
    }
    m2 /= m;
    m3 /= m;
    m4 /= m;
    model.residual_mean = rm;
    model.residual_sd = std::sqrt(m2);
    if (m2 > 0.0) {
      model.residual_skewness = m3 / std::pow(m2, 1.5);
      model.residual_kurtosis = m4 / (m2 * m2) - 3.0;
    }
  }
  return model;
}

std::vector<double> forecast(const ArimaModel& model, int horizon) {
  if (horizon < 0) throw ConfigError("forecast horizon must be nonnegative");
  int p = model.order.p;
  int q = model.order.q;

  std::vector<double> ztail = model.diffed_tail;   // oldest first
  std::vector<double> etail = model.residual_tail; // oldest first
  std::vector<double> anchors = model.integest_anchor;

  std::vector<double> out;
  out.reserve(horizon);
  for (int s = 0; s < horizon; ++s) {
    double zhat = model.mean;
    for (int i = 0; i < p; ++i)
      zhat += model.ar[i] * (ztail[ztail.size() - 1 - i] - model.mean);
    for (int j = 0; j < q; ++j) {
      int idx = static_cast<int>(etail.size()) - 1 - j;
      if (idx >= 0) zhat -= model.ma[j] * etail[idx];
    }
    if (p > 0) {
      ztail.erase(ztail.begin());
      ztail.push_back(zhat);
    }
    if (q > 0) etail.push_back(0.0);  // future shocks are unknown

    // Integrate back up through the differencing levels.
    double value = zhat;
    for (int j = model.order.d - 1; j >= 0; --j) {
      value = anchors[j] + value;
      anchors[j] = value;
    }
    out.push_back(value);
  }
  return out;
}

ScoreResult score(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw DataError("score inputs differ in length");
  if (actual.empty()) throw DataError("score inputs are empty");
  check_finite(actual);
  check_finite(predicted);

  int n = static_cast<int>(actual.size());
  double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / n;
  double sst = 0.0, sse = 0.0, abs_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = actual[i] - predicted[i];
    sse += r * r;
    abs_sum += std::abs(r);
    sst += (actual[i] - mean) * (actual[i] - mean);
  }
  if (sst <= 0.0) throw NumericError("cannot score against a constant actual series");

  ScoreResult s;
  s.r2 = 1.0 - sse / sst;
  s.rmse = std::sqrt(sse / n);
  s.mae = abs_sum / n;
  return s;
}

}  // namespace gridshare
