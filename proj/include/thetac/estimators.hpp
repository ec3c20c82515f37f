#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "thetac/panel.hpp"

namespace thetac {

// Per-country aggregate of screened theta_c observations.
struct CountrySummary {
  std::string country_code;
  double theta_mean = 0.0;  // unweighted mean over screened points
  int n_periods = 0;
  int first_year = 0;
  int last_year = 0;
  std::string period_string;  // "YY-YY(n)", two-digit zero-padded years
};

// Empty result means the country has no usable (screened) periods.
std::optional<CountrySummary> country_theta_summary(
    const std::vector<DerivedPoint>& points);

// GDP-weighted mean of theta_c over all screened country-year points,
// weights taken at the observation year. Empty screened set -> nullopt,
// never 0.
std::optional<double> pooled_weighted_theta(
    const std::vector<DerivedPoint>& points);

struct YearlyTheta {
  int year = 0;
  double weighted_theta = 0.0;
  int n_countries = 0;
};

// Per calendar year, the GDP-weighted cross-country mean of screened theta_c.
// Years without screened observations are omitted; output sorted by year.
std::vector<YearlyTheta> yearly_weighted_theta(
    const std::vector<DerivedPoint>& points);

enum class ResponseKind { NegCStar, NegDeltaCStar };
enum class RegressorKind { GrowthRate, DeltaGrowthRate };
enum class WeightKind { None, Gdp };

struct RegressionSpec {
  ResponseKind response = ResponseKind::NegDeltaCStar;
  RegressorKind regressor = RegressorKind::DeltaGrowthRate;
  ScreenConfig screen{ScreenVariable::DeltaGrowthRate, 0.01};
  WeightKind weights = WeightKind::Gdp;
  bool country_fe = true;
  bool year_fe = true;
};

struct RegressionResult {
  double coefficient = 0.0;
  double se_classical = 0.0;
  double se_cluster_country = 0.0;  // CR1 country-clustered sandwich
  int n_obs = 0;
  double r2 = 0.0;
  double r2_within = 0.0;
};

// Minimizes sum_i w_i (y_i - x_i . beta)^2 through a row-scaled
// column-pivoted Householder QR; never forms normal equations for the solve.
// Zero-weight rows are dropped first. Rank deficiency raises EstimationError
// naming the redundant columns (column_names may be empty for generic names).
Eigen::VectorXd solve_weighted_least_squares(
    const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
    const Eigen::VectorXd& weights,
    const std::vector<std::string>& column_names = {});

// Alternating weighted projection onto country and year group means until the
// largest adjustment of a sweep falls below 1e-10, at most 200 sweeps.
// Group ids are arbitrary integers; weights must be nonnegative.
std::vector<double> demean_two_way(std::vector<double> values,
                                   const std::vector<int>& country_ids,
                                   const std::vector<int>& year_ids,
                                   const std::vector<double>& weights);

struct WithinFit {
  double coefficient = 0.0;
  double r2_within = 0.0;
  int n_obs = 0;
};

// The within (demeaned) route to the same slope as the dummy-variable fit.
// Kept public so the two routes can be checked against each other.
WithinFit fit_within_regression(const RegressionSpec& spec,
                                const std::vector<DerivedPoint>& points);

// Weighted least squares with explicit intercept, regressor, and dummy sets
// per `spec`; first-listed country and year are the dropped baselines.
RegressionResult fit_panel_regression(const RegressionSpec& spec,
                                      const std::vector<DerivedPoint>& points);

// Flat key-value serialization, one statistic per line, full precision.
std::string regression_result_kv(const RegressionResult& result);

}  // namespace thetac
