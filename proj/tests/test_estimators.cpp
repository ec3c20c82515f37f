#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "thetac/errors.hpp"
#include "thetac/estimators.hpp"

using namespace thetac;

namespace {

const ScreenConfig kDefaultScreen{ScreenVariable::DeltaGrowthRate, 0.01};

DerivedPoint theta_point(const std::string& country, int year, double theta,
                         double gdp) {
  DerivedPoint p;
  p.country_code = country;
  p.year = year;
  p.theta_c = theta;
  p.gdp = gdp;
  p.passes_screen = true;
  return p;
}

// Generic (x, y) observation expressed through the level spec: the regressor
// is g and the response is -c*, so c* = -y.
DerivedPoint xy_point(const std::string& country, int year, double x, double y,
                      double gdp = 1.0) {
  DerivedPoint p;
  p.country_code = country;
  p.year = year;
  p.growth = x;
  p.c_star = -y;
  p.gdp = gdp;
  return p;
}

RegressionSpec level_spec(bool country_fe, bool year_fe,
                          WeightKind weights = WeightKind::None) {
  RegressionSpec spec;
  spec.response = ResponseKind::NegCStar;
  spec.regressor = RegressorKind::GrowthRate;
  spec.screen = {ScreenVariable::GrowthRate, 0.0};
  spec.weights = weights;
  spec.country_fe = country_fe;
  spec.year_fe = year_fe;
  return spec;
}

struct SimpleFit {
  double intercept = 0.0;
  double slope = 0.0;
};

// Closed-form weighted simple regression, the independent oracle.
SimpleFit closed_form_weighted(const std::vector<double>& x,
                               const std::vector<double>& y,
                               const std::vector<double>& w) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  SimpleFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  return fit;
}

}  // namespace

TEST_CASE("country_theta_summary on fixture F1") {
  auto points = derive_points(testutil::fixture_f1(), kDefaultScreen);
  auto summary = country_theta_summary(points);
  REQUIRE(summary);
  CHECK(std::fabs(summary->theta_mean - 1.0) <= 1e-12);
  CHECK(summary->n_periods == 1);
  CHECK(summary->period_string == "02-02(1)");
}

TEST_CASE("country_theta_summary two-point mean and period string") {
  std::vector<DerivedPoint> points{theta_point("AM", 1998, 0.2, 1.0),
                                   theta_point("AM", 2005, 0.4, 1.0)};
  auto summary = country_theta_summary(points);
  REQUIRE(summary);
  CHECK(summary->theta_mean == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(summary->period_string == "98-05(2)");
  CHECK(summary->first_year == 1998);
  CHECK(summary->last_year == 2005);
}

TEST_CASE("country_theta_summary edge cases") {
  SUBCASE("no screened points means no usable periods") {
    DerivedPoint unscreened = theta_point("AM", 2000, 0.5, 1.0);
    unscreened.passes_screen = false;
    CHECK(!country_theta_summary({unscreened}));
  }
  SUBCASE("mixed countries are rejected") {
    CHECK_THROWS_AS(country_theta_summary({theta_point("AM", 2000, 0.5, 1.0),
                                           theta_point("AZ", 2001, 0.5, 1.0)}),
                    EstimationError);
  }
  SUBCASE("a single screened point is reproduced exactly") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int i = 0; i < 20; ++i) {
      double theta = dist(rng);
      auto summary = country_theta_summary({theta_point("X", 2003, theta, 2.0)});
      REQUIRE(summary);
      CHECK(summary->theta_mean == theta);
    }
  }
}

TEST_CASE("pooled_weighted_theta") {
  SUBCASE("weighted mean") {
    auto pooled = pooled_weighted_theta({theta_point("A", 2000, 1.0, 3.0),
                                         theta_point("B", 2000, 0.0, 1.0)});
    REQUIRE(pooled);
    CHECK(*pooled == doctest::Approx(0.75).epsilon(1e-14));
  }
  SUBCASE("equal weights reduce to the ordinary mean") {
    auto pooled = pooled_weighted_theta({theta_point("A", 2000, 0.2, 2.0),
                                         theta_point("B", 2001, 0.4, 2.0),
                                         theta_point("C", 2002, 0.9, 2.0)});
    REQUIRE(pooled);
    CHECK(*pooled == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("empty screened set is an explicit no-data outcome") {
    CHECK(!pooled_weighted_theta({}));
    DerivedPoint p = theta_point("A", 2000, 1.0, 3.0);
    p.passes_screen = false;
    CHECK(!pooled_weighted_theta({p}));
  }
}

TEST_CASE("yearly_weighted_theta") {
  SUBCASE("singleton year returns that country's theta") {
    auto series = yearly_weighted_theta({theta_point("A", 2001, 0.37, 5.0)});
    REQUIRE(series.size() == 1);
    CHECK(series[0].year == 2001);
    CHECK(series[0].weighted_theta == 0.37);
    CHECK(series[0].n_countries == 1);
  }
  SUBCASE("equal GDP, opposite thetas cancel") {
    auto series = yearly_weighted_theta({theta_point("A", 2001, -1.0, 5.0),
                                         theta_point("B", 2001, 1.0, 5.0)});
    REQUIRE(series.size() == 1);
    CHECK(series[0].weighted_theta == 0.0);
    CHECK(series[0].n_countries == 2);
  }
  SUBCASE("fixtures F1 and F2 with equal GDP average to 0.5") {
    CountryPanel f1 = testutil::fixture_f1();
    CountryPanel f2 = testutil::fixture_f2();
    for (PanelRow& row : f1.rows) row.gdp = 50.0;
    for (PanelRow& row : f2.rows) row.gdp = 50.0;
    std::vector<DerivedPoint> points = derive_points(f1, kDefaultScreen);
    auto more = derive_points(f2, kDefaultScreen);
    points.insert(points.end(), more.begin(), more.end());
    auto series = yearly_weighted_theta(points);
    REQUIRE(series.size() == 1);
    CHECK(series[0].year == 2002);
    CHECK(std::fabs(series[0].weighted_theta - 0.5) <= 1e-12);
    CHECK(series[0].n_countries == 2);
  }
}

TEST_CASE("solve_weighted_least_squares basics") {
  SUBCASE("slope-only exact fit") {
    Eigen::MatrixXd design(2, 1);
    design << 1.0, 2.0;
    Eigen::VectorXd y(2);
    y << 1.0, 2.0;
    Eigen::VectorXd w = Eigen::VectorXd::Ones(2);
    Eigen::VectorXd beta = solve_weighted_least_squares(design, y, w);
    CHECK(std::fabs(beta[0] - 1.0) <= 1e-14);
  }
  SUBCASE("intercept-only mean") {
    Eigen::MatrixXd design = Eigen::MatrixXd::Ones(3, 1);
    Eigen::VectorXd y(3);
    y << 3.0, 3.0, 3.0;
    Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
    CHECK(std::fabs(solve_weighted_least_squares(design, y, w)[0] - 3.0) <=
          1e-14);
  }
  SUBCASE("closed-form simple regression oracle") {
    Eigen::MatrixXd design(3, 2);
    design << 1, 0, 1, 1, 1, 2;
    Eigen::VectorXd y(3);
    y << 0.0, 1.0, 2.2;
    Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
    Eigen::VectorXd beta = solve_weighted_least_squares(design, y, w);
    CHECK(std::fabs(beta[1] - 1.1) <= 1e-10);
    CHECK(std::fabs(beta[0] - (-1.0 / 30.0)) <= 1e-10);
  }
}

TEST_CASE("solve_weighted_least_squares against the weighted oracle") {
  std::mt19937_64 rng(314159);
  std::uniform_int_distribution<int> n_dist(3, 30);
  std::uniform_real_distribution<double> x_dist(-4.0, 4.0);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::uniform_real_distribution<double> w_dist(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    int n = n_dist(rng);
    std::vector<double> x(n), y(n), w(n);
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd yv(n), wv(n);
    for (int i = 0; i < n; ++i) {
      x[i] = x_dist(rng);
      y[i] = 0.7 - 1.3 * x[i] + noise(rng);
      w[i] = w_dist(rng);
      design(i, 0) = 1.0;
      design(i, 1) = x[i];
      yv[i] = y[i];
      wv[i] = w[i];
    }
    SimpleFit oracle = closed_form_weighted(x, y, w);
    Eigen::VectorXd beta = solve_weighted_least_squares(design, yv, wv);
    CHECK(std::fabs(beta[0] - oracle.intercept) <= 1e-10);
    CHECK(std::fabs(beta[1] - oracle.slope) <= 1e-10);
  }
}

TEST_CASE("solve_weighted_least_squares error paths") {
  Eigen::MatrixXd design(3, 2);
  design << 1, 0, 1, 1, 1, 2;
  Eigen::VectorXd y(3);
  y << 0, 1, 2;
  SUBCASE("misaligned rows") {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(solve_weighted_least_squares(design, y, w),
                    EstimationError);
  }
  SUBCASE("negative weights") {
    Eigen::VectorXd w(3);
    w << 1, -1, 1;
    CHECK_THROWS_AS(solve_weighted_least_squares(design, y, w),
                    EstimationError);
  }
  SUBCASE("too few positive-weight rows") {
    Eigen::VectorXd w(3);
    w << 1, 0, 0;
    CHECK_THROWS_AS(solve_weighted_least_squares(design, y, w),
                    EstimationError);
  }
  SUBCASE("rank deficiency names the redundant column") {
    Eigen::MatrixXd bad(4, 3);
    bad << 1, 0.5, 1, 1, 1.5, 1, 1, 2.5, 1, 1, 3.5, 1;
    Eigen::VectorXd yy(4);
    yy << 1, 2, 3, 4;
    Eigen::VectorXd w = Eigen::VectorXd::Ones(4);
    CHECK_THROWS_WITH_AS(
        solve_weighted_least_squares(bad, yy, w, {"a", "x", "b"}),
        doctest::Contains("rank deficient"), EstimationError);
  }
  SUBCASE("zero-weight rows do not affect the solution") {
    Eigen::MatrixXd padded(5, 2);
    padded << 1, 0, 1, 1, 1, 2, 1, 50, 1, -70;
    Eigen::VectorXd yy(5);
    yy << 0, 1, 2.2, 1000, -4;
    Eigen::VectorXd w(5);
    w << 1, 1, 1, 0, 0;
    Eigen::VectorXd full = solve_weighted_least_squares(padded, yy, w);
    Eigen::VectorXd y3(3);
    y3 << 0, 1, 2.2;
    Eigen::VectorXd sub =
        solve_weighted_least_squares(design, y3, Eigen::VectorXd::Ones(3));
    CHECK(full[0] == sub[0]);
    CHECK(full[1] == sub[1]);
  }
}

TEST_CASE("demean_two_way") {
  SUBCASE("single country subtracts weighted year means exactly") {
    // Two years: year 0 holds {2, 4} with weights {1, 3}, year 1 holds {10}.
    std::vector<double> values{2.0, 4.0, 10.0};
    std::vector<int> countries{0, 0, 0};
    std::vector<int> years{0, 0, 1};
    std::vector<double> weights{1.0, 3.0, 5.0};
    auto out = demean_two_way(values, countries, years, weights);
    CHECK(std::fabs(out[0] - (2.0 - 3.5)) <= 1e-12);
    CHECK(std::fabs(out[1] - (4.0 - 3.5)) <= 1e-12);
    CHECK(std::fabs(out[2]) <= 1e-12);
  }
  SUBCASE("mean-zero data is a fixed point") {
    std::vector<double> values{1.0, -1.0, -1.0, 1.0};
    std::vector<int> countries{0, 0, 1, 1};
    std::vector<int> years{0, 1, 0, 1};
    std::vector<double> weights{2.0, 2.0, 2.0, 2.0};
    auto out = demean_two_way(values, countries, years, weights);
    for (int i = 0; i < 4; ++i) CHECK(std::fabs(out[i] - values[i]) <= 1e-12);
  }
  SUBCASE("result is orthogonal to both dummy sets under the weights") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> v_dist(-10.0, 10.0);
    std::uniform_real_distribution<double> w_dist(0.5, 20.0);
    const int n = 60;
    std::vector<double> values(n), weights(n);
    std::vector<int> countries(n), years(n);
    for (int i = 0; i < n; ++i) {
      values[i] = v_dist(rng);
      weights[i] = w_dist(rng);
      countries[i] = static_cast<int>(rng() % 6);
      years[i] = static_cast<int>(rng() % 8);
    }
    auto out = demean_two_way(values, countries, years, weights);
    for (int g = 0; g < 8; ++g) {
      double cnum = 0, cden = 0, ynum = 0, yden = 0;
      for (int i = 0; i < n; ++i) {
        if (countries[i] == g) { cnum += weights[i] * out[i]; cden += weights[i]; }
        if (years[i] == g) { ynum += weights[i] * out[i]; yden += weights[i]; }
      }
      if (cden > 0) CHECK(std::fabs(cnum / cden) <= 1e-9);
      if (yden > 0) CHECK(std::fabs(ynum / yden) <= 1e-9);
    }
  }
  SUBCASE("misaligned inputs are rejected") {
    CHECK_THROWS_AS(demean_two_way({1.0}, {0, 0}, {0}, {1.0}),
                    EstimationError);
  }
}

TEST_CASE("fit_panel_regression recovers the common slope under country FE") {
  // Country A: (0,0), (1,1). Country B: (0,5), (1,6). Hand LSDV solution: 1.
  std::vector<DerivedPoint> points{
      xy_point("A", 2000, 0.0, 0.0), xy_point("A", 2001, 1.0, 1.0),
      xy_point("B", 2000, 0.0, 5.0), xy_point("B", 2001, 1.0, 6.0)};
  RegressionResult fit =
      fit_panel_regression(level_spec(true, false), points);
  CHECK(std::fabs(fit.coefficient - 1.0) <= 1e-12);
  CHECK(fit.n_obs == 4);
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("LSDV and two-way demeaning agree") {
  std::mt19937_64 rng(777);
  int compared = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<DerivedPoint> points;
    int n_countries = 3 + static_cast<int>(rng() % 6);
    for (int c = 0; c < n_countries; ++c) {
      auto panel =
          testutil::random_panel(rng, "C" + std::to_string(c), 8);
      auto derived = derive_points(panel, kDefaultScreen);
      points.insert(points.end(), derived.begin(), derived.end());
    }
    for (bool country_fe : {true, false}) {
      for (bool year_fe : {true, false}) {
        RegressionSpec spec;
        spec.screen = kDefaultScreen;
        spec.weights = WeightKind::Gdp;
        spec.country_fe = country_fe;
        spec.year_fe = year_fe;
        RegressionResult lsdv;
        WithinFit within;
        try {
          lsdv = fit_panel_regression(spec, points);
          within = fit_within_regression(spec, points);
        } catch (const EstimationError&) {
          continue;  // a draw with disconnected dummies; not the target here
        }
        CHECK(std::fabs(lsdv.coefficient - within.coefficient) <= 1e-8);
        CHECK(lsdv.n_obs == within.n_obs);
        ++compared;
      }
    }
  }
  CHECK(compared >= 20);
}

TEST_CASE("weight scale invariance") {
  std::mt19937_64 rng(2024);
  std::vector<DerivedPoint> points;
  for (int c = 0; c < 6; ++c) {
    auto derived = derive_points(
        testutil::random_panel(rng, "W" + std::to_string(c), 9),
        kDefaultScreen);
    points.insert(points.end(), derived.begin(), derived.end());
  }
  RegressionSpec spec;
  spec.screen = kDefaultScreen;
  spec.weights = WeightKind::Gdp;
  RegressionResult base = fit_panel_regression(spec, points);

  for (double scale : {7.3, 1e9, 1e-7}) {
    std::vector<DerivedPoint> scaled = points;
    for (DerivedPoint& p : scaled) p.gdp *= scale;
    RegressionResult other = fit_panel_regression(spec, scaled);
    auto close = [](double a, double b) {
      return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a));
    };
    CHECK(close(base.coefficient, other.coefficient));
    CHECK(close(base.se_classical, other.se_classical));
    CHECK(close(base.se_cluster_country, other.se_cluster_country));
    CHECK(close(base.r2, other.r2));
    CHECK(close(base.r2_within, other.r2_within));
    CHECK(base.n_obs == other.n_obs);
  }
}

TEST_CASE("clustered SE with singleton clusters equals HC1") {
  std::mt19937_64 rng(8888);
  std::uniform_real_distribution<double> x_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  std::uniform_real_distribution<double> w_dist(0.5, 4.0);
  const int n = 25;
  std::vector<DerivedPoint> points;
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n), w(n);
  for (int i = 0; i < n; ++i) {
    double x = x_dist(rng);
    double value = 0.4 + 0.9 * x + noise(rng);
    points.push_back(
        xy_point("C" + std::to_string(100 + i), 2000 + i, x, value, w_dist(rng)));
    design(i, 0) = 1.0;
    design(i, 1) = x;
    y[i] = value;
    w[i] = points.back().gdp;
  }
  RegressionResult fit =
      fit_panel_regression(level_spec(false, false, WeightKind::Gdp), points);

  // Independent HC1 sandwich.
  Eigen::MatrixXd xtwx = design.transpose() * w.asDiagonal() * design;
  Eigen::MatrixXd bread = xtwx.inverse();
  Eigen::VectorXd beta =
      bread * design.transpose() * w.asDiagonal() * y;
  Eigen::VectorXd resid = y - design * beta;
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i)
    meat += w[i] * w[i] * resid[i] * resid[i] *
            design.row(i).transpose() * design.row(i);
  double hc1 = std::sqrt(
      (static_cast<double>(n) / (n - 2)) * (bread * meat * bread)(1, 1));
  CHECK(std::fabs(fit.se_cluster_country - hc1) <= 1e-10);
}

TEST_CASE("fit_panel_regression error paths") {
  std::vector<DerivedPoint> one_country{xy_point("A", 2000, 0.0, 0.0),
                                        xy_point("A", 2001, 1.0, 1.0),
                                        xy_point("A", 2002, 2.0, 2.1)};
  SUBCASE("country FE needs two countries") {
    CHECK_THROWS_AS(fit_panel_regression(level_spec(true, false), one_country),
                    EstimationError);
  }
  SUBCASE("year FE needs two years") {
    std::vector<DerivedPoint> one_year{xy_point("A", 2000, 0.0, 0.0),
                                       xy_point("B", 2000, 1.0, 1.0),
                                       xy_point("C", 2000, 2.0, 2.1)};
    CHECK_THROWS_AS(fit_panel_regression(level_spec(false, true), one_year),
                    EstimationError);
  }
  SUBCASE("empty screened sample") {
    RegressionSpec spec = level_spec(false, false);
    spec.screen.threshold = 100.0;
    CHECK_THROWS_AS(fit_panel_regression(spec, one_country), EstimationError);
  }
  SUBCASE("no residual degrees of freedom") {
    std::vector<DerivedPoint> two{xy_point("A", 2000, 0.0, 0.0),
                                  xy_point("B", 2001, 1.0, 1.0)};
    CHECK_THROWS_AS(fit_panel_regression(level_spec(false, false), two),
                    EstimationError);
  }
  SUBCASE("mismatched response/regressor pairing") {
    RegressionSpec spec = level_spec(false, false);
    spec.regressor = RegressorKind::DeltaGrowthRate;
    CHECK_THROWS_AS(fit_panel_regression(spec, one_country), EstimationError);
  }
}

TEST_CASE("regression_result_kv is a stable field-per-line format") {
  std::vector<DerivedPoint> points{
      xy_point("A", 2000, 0.0, 0.0), xy_point("A", 2001, 1.0, 1.0),
      xy_point("B", 2000, 0.0, 5.0), xy_point("B", 2001, 1.0, 6.0),
      xy_point("B", 2002, 2.0, 6.9)};
  RegressionResult fit = fit_panel_regression(level_spec(true, false), points);
  std::string kv = regression_result_kv(fit);

  std::vector<std::string> expected_keys{"coefficient", "se_classical",
                                         "se_cluster_country", "n_obs", "r2",
                                         "r2_within"};
  std::istringstream in(kv);
  std::string line;
  std::size_t idx = 0;
  while (std::getline(in, line)) {
    REQUIRE(idx < expected_keys.size());
    auto space = line.find(' ');
    REQUIRE(space != std::string::npos);
    CHECK(line.substr(0, space) == expected_keys[idx]);
    ++idx;
  }
  CHECK(idx == expected_keys.size());
  // Full precision round-trip of the coefficient.
  auto space = kv.find(' ');
  auto eol = kv.find('\n');
  double parsed = std::stod(kv.substr(space + 1, eol - space - 1));
  CHECK(parsed == fit.coefficient);
}
