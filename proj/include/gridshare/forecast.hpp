#pragma once

#include <span>
#include <vector>

#include "gridshare/errors.hpp"

namespace gridshare {

struct ArimaOrder {
  int p = 0;  // autoregressive lags
  int d = 0;  // differencing passes
  int q = 0;  // moving-average lags
};

// Fitted model plus everything needed to roll forecasts forward: the tail of
// the differenced series, the tail of the in-sample residuals, and the last
// value at each integration level for undifferencing.
struct ArimaModel {
  ArimaOrder order;
  std::vector<double> ar;  // phi
  std::vector<double> ma;  // theta, in the (1 - theta_1 B - ...) convention
  bool has_mean = false;
  double mean = 0.0;
  double sigma2 = 0.0;
  double css = 0.0;
  int n_obs = 0;  // differenced-series length used for fitting

  std::vector<double> diffed_tail;     // last p values of the differenced series
  std::vector<double> residual_tail;   // last q residuals
  std::vector<double> integest_anchor; // last value at integration levels 0..d-1

  double residual_mean = 0.0;
  double residual_sd = 0.0;
  double residual_skewness = 0.0;
  double residual_kurtosis = 0.0;  // excess
};

struct AdfResult {
  double statistic = 0.0;
  bool stationary = false;
  int lag = 0;
};

// Unit-root regression with constant, lag floor((len-1)^(1/3)); stationary
// below the 5% critical value -2.86. Collinear or perfectly fitted
// regressions report statistic 0 (not stationary). Constant input throws.
AdfResult adf_test(std::span<const double> series);

// Biased autocorrelation estimate; index k = lag k, [0] = 1.
std::vector<double> acf(std::span<const double> series, int max_lag);
// Partial autocorrelation via Durbin-Levinson on acf; [0] = 1.
std::vector<double> pacf(std::span<const double> series, int max_lag);

// d by repeated unit-root testing (capped at 2; constant-after-differencing
// counts as stationary), then p and q as the last lag whose pacf / acf leaves
// the +-2/sqrt(n) band, capped at 5.
ArimaOrder select_order(std::span<const double> series);

// Conditional-sum-of-squares fit. Coefficients are optimized through a
// partial-autocorrelation transform, so the AR part is always stationary and
// the MA part invertible. A mean term is estimated when d == 0, or when
// d >= 1 with at least one AR or MA lag; a bare random walk gets none.
ArimaModel fit_arima(std::span<const double> series, const ArimaOrder& order);

std::vector<double> forecast(const ArimaModel& model, int horizon);

struct ScoreResult {
  double r2 = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
};

// r2 is computed against the mean of `actual`; constant actuals throw.
ScoreResult score(std::span<const double> actual, std::span<const double> predicted);

std::vector<double> difference(std::span<const double> series, int d);

}  // namespace gridshare
