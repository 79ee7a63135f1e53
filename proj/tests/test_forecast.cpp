#include <cmath>
#include <vector>

#include "doctest.h"
#include "gridshare/forecast.hpp"
#include "gridshare/rng.hpp"

using namespace gridshare;

namespace {

std::vector<double> simulate_ar1(double phi, double mean, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(n);
  double z = 0.0;
  for (int i = 0; i < n + 100; ++i) {  // burn-in washes out the zero start
    z = phi * z + rng.normal();
    if (i >= 100) s[i - 100] = mean + z;
  }
  return s;
}

// MA coefficients follow the fitted convention z_t = mu + eps_t - theta eps_{t-1}.
std::vector<double> simulate_ima11(double theta, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(n);
  double level = 50.0;
  double prev_eps = rng.normal();
  for (int i = 0; i < n; ++i) {
    double eps = rng.normal();
    level += eps - theta * prev_eps;
    prev_eps = eps;
    s[i] = level;
  }
  return s;
}

std::vector<double> random_walk(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(n);
  double level = 0.0;
  for (int i = 0; i < n; ++i) {
    level += rng.normal();
    s[i] = level;
  }
  return s;
}

double sample_variance(const std::vector<double>& s) {
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= s.size();
  double acc = 0.0;
  for (double v : s) acc += (v - mean) * (v - mean);
  return acc / s.size();
}

}  // namespace

TEST_SUITE("forecast") {

TEST_CASE("difference round trips") {
  Rng rng(0xD1FFu);
  std::vector<double> s(40);
  for (double& v : s) v = rng.normal();

  CHECK(difference(s, 0) == s);

  std::vector<double> d1 = difference(s, 1);
  REQUIRE(d1.size() == 39);
  std::vector<double> rebuilt = {s[0]};
  for (double step : d1) rebuilt.push_back(rebuilt.back() + step);
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(rebuilt[i] == doctest::Approx(s[i]).epsilon(1e-9));

  CHECK(difference(s, 2).size() == 38);
  CHECK_THROWS_AS(difference(s, -1), ConfigError);
  CHECK_THROWS_AS(difference(std::vector<double>{1.0, 2.0}, 2), NumericError);
}

TEST_CASE("acf and pacf of an autoregressive signal") {
  std::vector<double> s = simulate_ar1(0.7, 0.0, 20000, 0xAC0Fu);
  std::vector<double> corr = acf(s, 3);
  std::vector<double> part = pacf(s, 3);

  CHECK(corr[0] == 1.0);
  CHECK(part[0] == 1.0);
  CHECK(corr[1] == doctest::Approx(0.7).epsilon(0.03));
  CHECK(corr[2] == doctest::Approx(0.49).epsilon(0.04));
  CHECK(part[1] == doctest::Approx(0.7).epsilon(0.03));
  // The AR(1) partial autocorrelation cuts off after lag one.
  CHECK(std::abs(part[2]) < 0.03);
  CHECK(std::abs(part[3]) < 0.03);
}

TEST_CASE("acf bounds and degeneracy") {
  std::vector<double> s(20, 0.0);
  Rng rng(1);
  for (double& v : s) v = rng.normal();
  CHECK(acf(s, 0) == std::vector<double>{1.0});
  CHECK_THROWS_AS(acf(s, 10), ConfigError);  // 2 * lag must stay below n
  CHECK_THROWS_AS(acf(s, -1), ConfigError);
  std::vector<double> flat(20, 3.0);
  CHECK_THROWS_AS(acf(flat, 2), NumericError);
}

TEST_CASE("unit-root test separates noise from walks") {
  Rng rng(0xADFu);
  std::vector<double> noise(500);
  for (double& v : noise) v = rng.normal();
  AdfResult stat = adf_test(noise);
  CHECK(stat.stationary);
  CHECK(stat.statistic < -2.86);
  CHECK(stat.lag == 7);  // floor((499)^(1/3))

  std::vector<double> walk = random_walk(500, 0x177Au);
  CHECK_FALSE(adf_test(walk).stationary);
  std::vector<double> rediffed = difference(walk, 1);
  CHECK(adf_test(rediffed).stationary);

  // A deterministic trend fools the constant-only regression into keeping the
  // unit root, which is what routes trending series through differencing.
  std::vector<double> trend(200);
  for (int i = 0; i < 200; ++i) trend[i] = 2.0 * i;
  CHECK_FALSE(adf_test(trend).stationary);

  CHECK_THROWS_AS(adf_test(std::vector<double>(50, 1.0)), NumericError);
  CHECK_THROWS_AS(adf_test(std::vector<double>(19, 0.0)), DataError);
}

TEST_CASE("order selection picks the differencing depth") {
  std::vector<double> ar = simulate_ar1(0.8, 5.0, 400, 0x0DE2u);
  ArimaOrder o1 = select_order(ar);
  CHECK(o1.d == 0);
  CHECK(o1.p >= 1);

  ArimaOrder o2 = select_order(random_walk(300, 0x3A1Bu));
  CHECK(o2.d == 1);

  Rng rng(0x11EAu);
  std::vector<double> trend(300);
  for (int i = 0; i < 300; ++i) trend[i] = 2.0 * i + 0.1 * rng.normal();
  CHECK(select_order(trend).d == 1);

  std::vector<double> ramp(100);
  for (int i = 0; i < 100; ++i) ramp[i] = 4.0 + 3.0 * i;
  ArimaOrder o3 = select_order(ramp);
  CHECK(o3.d == 1);  // first difference is already constant
  CHECK(o3.p == 0);
  CHECK(o3.q == 0);

  std::vector<double> quad(100);
  for (int i = 0; i < 100; ++i) quad[i] = 0.5 * i * i;
  ArimaOrder o4 = select_order(quad);
  CHECK(o4.d == 2);
  CHECK(o4.p == 0);
  CHECK(o4.q == 0);

  CHECK_THROWS_AS(select_order(std::vector<double>(49, 1.0)), DataError);
}

TEST_CASE("fit rejects bad or underfed orders") {
  std::vector<double> s = simulate_ar1(0.5, 0.0, 60, 0xBADu);
  CHECK_THROWS_AS(fit_arima(s, {-1, 0, 0}), ConfigError);
  CHECK_THROWS_AS(fit_arima(s, {0, 3, 0}), ConfigError);
  CHECK_THROWS_AS(fit_arima(s, {13, 0, 0}), ConfigError);

  // (1,0,1) needs ten observations per estimated coefficient.
  std::vector<double> short_series(s.begin(), s.begin() + 29);
  CHECK_THROWS_AS(fit_arima(short_series, {1, 0, 1}), DataError);
  std::vector<double> enough(s.begin(), s.begin() + 30);
  CHECK_NOTHROW(fit_arima(enough, {1, 0, 1}));
}

TEST_CASE("autoregressive coefficient recovery") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    std::vector<double> s = simulate_ar1(0.7, 20.0, 5000, seed);
    ArimaModel m = fit_arima(s, {1, 0, 0});
    CHECK(m.ar.size() == 1);
    CHECK(std::abs(m.ar[0] - 0.7) <= 0.07);
    CHECK(m.has_mean);
    CHECK(m.mean == doctest::Approx(20.0).epsilon(0.02));
    CHECK(m.sigma2 == doctest::Approx(1.0).epsilon(0.15));
    CHECK(std::abs(m.residual_mean) < 0.05);
    CHECK(m.residual_sd == doctest::Approx(std::sqrt(m.sigma2)).epsilon(0.05));
    CHECK(m.n_obs == 5000);

    // Explaining the lag-one dependence must beat the flat model.
    CHECK(m.sigma2 < sample_variance(s));
  }
}

TEST_CASE("moving-average coefficient recovery") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    std::vector<double> s = simulate_ima11(0.5, 5000, seed);
    ArimaModel m = fit_arima(s, {0, 1, 1});
    CHECK(m.ma.size() == 1);
    CHECK(std::abs(m.ma[0] - 0.5) <= 0.07);
    CHECK(m.n_obs == 4999);
  }
}

TEST_CASE("random-walk forecast repeats the last value exactly") {
  std::vector<double> s = random_walk(120, 0x9A17u);
  ArimaModel m = fit_arima(s, {0, 1, 0});
  CHECK_FALSE(m.has_mean);  // a bare random walk carries no drift term
  std::vector<double> f = forecast(m, 6);
  REQUIRE(f.size() == 6);
  for (double v : f) CHECK(v == s.back());
}

TEST_CASE("twice-differenced line continues exactly") {
  std::vector<double> line(60);
  for (int i = 0; i < 60; ++i) line[i] = 3.0 + 2.0 * i;
  ArimaModel m = fit_arima(line, {0, 2, 0});
  std::vector<double> f = forecast(m, 4);
  for (int h = 0; h < 4; ++h)
    CHECK(f[h] == doctest::Approx(3.0 + 2.0 * (60 + h)).epsilon(1e-9));
}

TEST_CASE("forecast recursion decays toward the mean") {
  ArimaModel m;
  m.order = {1, 0, 0};
  m.ar = {0.5};
  m.has_mean = true;
  m.mean = 10.0;
  m.diffed_tail = {12.0};
  std::vector<double> f = forecast(m, 3);
  CHECK(f[0] == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(f[1] == doctest::Approx(10.5).epsilon(1e-12));
  CHECK(f[2] == doctest::Approx(10.25).epsilon(1e-12));

  ArimaModel ma;
  ma.order = {0, 0, 1};
  ma.ma = {0.4};
  ma.has_mean = true;
  ma.mean = 5.0;
  ma.residual_tail = {2.0};
  std::vector<double> g = forecast(ma, 3);
  CHECK(g[0] == doctest::Approx(5.0 - 0.4 * 2.0).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(5.0).epsilon(1e-12));

  CHECK(forecast(m, 0).empty());
  CHECK_THROWS_AS(forecast(m, -1), ConfigError);
}

TEST_CASE("score reproduces the hand triples") {
  ScoreResult a = score(std::vector<double>{0.0, 2.0}, std::vector<double>{1.0, 1.0});
  CHECK(a.r2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a.rmse == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.mae == doctest::Approx(1.0).epsilon(1e-12));

  ScoreResult b = score(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.0, 2.0, 5.0});
  CHECK(b.r2 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(b.rmse == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-12));
  CHECK(b.mae == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  ScoreResult c = score(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0});
  CHECK(c.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.rmse == 0.0);
  CHECK(c.mae == 0.0);
}

TEST_CASE("score input validation") {
  CHECK_THROWS_AS(score(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), DataError);
  CHECK_THROWS_AS(score(std::vector<double>{}, std::vector<double>{}), DataError);
  CHECK_THROWS_AS(score(std::vector<double>{2.0, 2.0}, std::vector<double>{1.0, 3.0}),
                  NumericError);
}

}  // TEST_SUITE
