#include "thetac/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "thetac/errors.hpp"
#include "thetac/text.hpp"

namespace thetac {

namespace {

bool screened_theta(const DerivedPoint& point) {
  return point.passes_screen && point.theta_c.has_value();
}

struct SampleRow {
  std::string country;
  int year = 0;
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
};

const char* regressor_name(RegressorKind kind) {
  return kind == RegressorKind::GrowthRate ? "g" : "delta_g";
}

// Screened estimation sample in deterministic (country, year) order.
// Rows with zero weight are dropped here so every consumer sees one sample.
std::vector<SampleRow> build_sample(const RegressionSpec& spec,
                                    std::vector<DerivedPoint> points) {
  const bool level = spec.response == ResponseKind::NegCStar;
  if (level != (spec.regressor == RegressorKind::GrowthRate))
    throw EstimationError(
        "response/regressor pairing must be (-c*, g) or (-delta_c*, delta_g)");
  if (!(spec.screen.threshold >= 0.0) || !std::isfinite(spec.screen.threshold))
    throw InputError("screen threshold must be finite and nonnegative");

  std::sort(points.begin(), points.end(),
            [](const DerivedPoint& a, const DerivedPoint& b) {
              if (a.country_code != b.country_code)
                return a.country_code < b.country_code;
              return a.year < b.year;
            });

  std::vector<SampleRow> sample;
  for (const DerivedPoint& point : points) {
    if (!passes_screen(point, spec.screen)) continue;
    SampleRow row;
    row.country = point.country_code;
    row.year = point.year;
    if (level) {
      if (!point.growth) continue;
      row.x = *point.growth;
      row.y = -point.c_star;
    } else {
      if (!point.delta_growth || !point.delta_c_star) continue;
      row.x = *point.delta_growth;
      row.y = -*point.delta_c_star;
    }
    row.w = spec.weights == WeightKind::Gdp ? point.gdp : 1.0;
    if (row.w <= 0.0) continue;
    sample.push_back(std::move(row));
  }
  return sample;
}

std::vector<int> dense_ids(const std::vector<SampleRow>& sample, bool by_country) {
  std::map<std::string, int> cmap;
  std::map<int, int> ymap;
  if (by_country) {
    for (const SampleRow& row : sample) cmap.emplace(row.country, 0);
    int next = 0;
    for (auto& [code, id] : cmap) id = next++;
  } else {
    for (const SampleRow& row : sample) ymap.emplace(row.year, 0);
    int next = 0;
    for (auto& [year, id] : ymap) id = next++;
  }
  std::vector<int> ids;
  ids.reserve(sample.size());
  for (const SampleRow& row : sample)
    ids.push_back(by_country ? cmap[row.country] : ymap[row.year]);
  return ids;
}

int count_groups(const std::vector<int>& ids) {
  if (ids.empty()) return 0;
  return *std::max_element(ids.begin(), ids.end()) + 1;
}

struct WithinStats {
  double coefficient = 0.0;
  double ssr = 0.0;  // weighted residual sum of squares
  double sst = 0.0;  // weighted total sum of squares of the demeaned response
};

WithinStats within_fit(const std::vector<SampleRow>& sample, bool country_fe,
                       bool year_fe) {
  const std::size_t n = sample.size();
  std::vector<double> y(n), x(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = sample[i].y;
    x[i] = sample[i].x;
    w[i] = sample[i].w;
  }
  // A single group along a switched-off dimension reduces that projection to
  // the grand weighted mean, which partials out the intercept.
  std::vector<int> cids = country_fe ? dense_ids(sample, true)
                                     : std::vector<int>(n, 0);
  std::vector<int> yids = year_fe ? dense_ids(sample, false)
                                  : std::vector<int>(n, 0);
  std::vector<double> yt = demean_two_way(y, cids, yids, w);
  std::vector<double> xt = demean_two_way(x, cids, yids, w);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * xt[i] * xt[i];
    sxy += w[i] * xt[i] * yt[i];
  }
  if (sxx <= 0.0)
    throw EstimationError("regressor has no within variation");

  WithinStats stats;
  stats.coefficient = sxy / sxx;
  for (std::size_t i = 0; i < n; ++i) {
    double resid = yt[i] - stats.coefficient * xt[i];
    stats.ssr += w[i] * resid * resid;
    stats.sst += w[i] * yt[i] * yt[i];
  }
  return stats;
}

double ratio_r2(double ssr, double sst) {
  if (sst <= 0.0) return ssr <= 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - ssr / sst, 0.0, 1.0);
}

}  // namespace

std::optional<CountrySummary> country_theta_summary(
    const std::vector<DerivedPoint>& points) {
  CountrySummary summary;
  double sum = 0.0;
  for (const DerivedPoint& point : points) {
    if (!summary.country_code.empty() &&
        point.country_code != summary.country_code)
      throw EstimationError("country_theta_summary: mixed countries");
    if (summary.country_code.empty()) summary.country_code = point.country_code;
    if (!screened_theta(point)) continue;
    sum += *point.theta_c;
    if (summary.n_periods == 0) {
      summary.first_year = summary.last_year = point.year;
    } else {
      summary.first_year = std::min(summary.first_year, point.year);
      summary.last_year = std::max(summary.last_year, point.year);
    }
    ++summary.n_periods;
  }
  if (summary.n_periods == 0) return std::nullopt;  // no usable periods
  summary.theta_mean = sum / summary.n_periods;
  summary.period_string = two_digit_year(summary.first_year) + "-" +
                          two_digit_year(summary.last_year) + "(" +
                          std::to_string(summary.n_periods) + ")";
  return summary;
}

std::optional<double> pooled_weighted_theta(
    const std::vector<DerivedPoint>& points) {
  double num = 0.0, den = 0.0;
  for (const DerivedPoint& point : points) {
    if (!screened_theta(point)) continue;
    num += point.gdp * *point.theta_c;
    den += point.gdp;
  }
  if (den <= 0.0) return std::nullopt;  // no data, never 0
  return num / den;
}

std::vector<YearlyTheta> yearly_weighted_theta(
    const std::vector<DerivedPoint>& points) {
  struct Acc {
    double num = 0.0, den = 0.0;
    int count = 0;
  };
  std::map<int, Acc> by_year;
  for (const DerivedPoint& point : points) {
    if (!screened_theta(point) || point.gdp <= 0.0) continue;
    Acc& acc = by_year[point.year];
    acc.num += point.gdp * *point.theta_c;
    acc.den += point.gdp;
    ++acc.count;
  }
  std::vector<YearlyTheta> out;
  out.reserve(by_year.size());
  for (const auto& [year, acc] : by_year)
    out.push_back({year, acc.num / acc.den, acc.count});
  return out;
}

Eigen::VectorXd solve_weighted_least_squares(
    const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
    const Eigen::VectorXd& weights,
    const std::vector<std::string>& column_names) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (response.size() != n || weights.size() != n)
    throw EstimationError("design, response, and weights disagree on rows");
  if ((weights.array() < 0.0).any())
    throw EstimationError("negative weight");

  Eigen::Index kept = (weights.array() > 0.0).count();
  if (kept < p)
    throw EstimationError("fewer positive-weight rows than columns");

  Eigen::MatrixXd scaled(kept, p);
  Eigen::VectorXd z(kept);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights[i] <= 0.0) continue;
    double s = std::sqrt(weights[i]);
    scaled.row(r) = s * design.row(i);
    z[r] = s * response[i];
    ++r;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  if (qr.rank() < p) {
    // Columns pivoted past the numerical rank are the redundant ones.
    auto perm = qr.colsPermutation().indices();
    std::string offending;
    for (Eigen::Index k = qr.rank(); k < p; ++k) {
      Eigen::Index col = perm[k];
      if (!offending.empty()) offending += ", ";
      offending += col < static_cast<Eigen::Index>(column_names.size())
                       ? column_names[col]
                       : "column " + std::to_string(col);
    }
    throw EstimationError("design matrix is rank deficient; redundant: " +
                          offending);
  }
  return qr.solve(z);
}

std::vector<double> demean_two_way(std::vector<double> values,
                                   const std::vector<int>& country_ids,
                                   const std::vector<int>& year_ids,
                                   const std::vector<double>& weights) {
  const std::size_t n = values.size();
  if (country_ids.size() != n || year_ids.size() != n || weights.size() != n)
    throw EstimationError("demean_two_way: misaligned inputs");
  if (n == 0) return values;

  auto compress = [n](const std::vector<int>& raw) {
    std::map<int, int> ids;
    for (int v : raw) ids.emplace(v, 0);
    int next = 0;
    for (auto& [key, id] : ids) id = next++;
    std::vector<int> dense(n);
    for (std::size_t i = 0; i < n; ++i) dense[i] = ids[raw[i]];
    return std::pair{dense, next};
  };
  auto [cids, n_countries] = compress(country_ids);
  auto [yids, n_years] = compress(year_ids);

  std::vector<double> group_w(std::max(n_countries, n_years), 0.0);
  std::vector<double> group_sum(group_w.size(), 0.0);

  constexpr double kTol = 1e-10;
  constexpr int kMaxSweeps = 200;
  double max_change = 0.0;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    max_change = 0.0;
    for (const std::vector<int>* ids : {&cids, &yids}) {
      int groups = ids == &cids ? n_countries : n_years;
      std::fill(group_w.begin(), group_w.begin() + groups, 0.0);
      std::fill(group_sum.begin(), group_sum.begin() + groups, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        group_w[(*ids)[i]] += weights[i];
        group_sum[(*ids)[i]] += weights[i] * values[i];
      }
      for (int g = 0; g < groups; ++g)
        group_sum[g] = group_w[g] > 0.0 ? group_sum[g] / group_w[g] : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double mean = group_sum[(*ids)[i]];
        values[i] -= mean;
        max_change = std::max(max_change, std::fabs(mean));
      }
    }
    if (max_change < kTol) return values;
  }
  throw EstimationError(
      "two-way demeaning did not converge after 200 sweeps; last change " +
      format_double(max_change));
}

WithinFit fit_within_regression(const RegressionSpec& spec,
                                const std::vector<DerivedPoint>& points) {
  std::vector<SampleRow> sample = build_sample(spec, points);
  if (sample.empty()) throw EstimationError("screened sample is empty");
  WithinStats stats = within_fit(sample, spec.country_fe, spec.year_fe);
  return {stats.coefficient, ratio_r2(stats.ssr, stats.sst),
          static_cast<int>(sample.size())};
}

RegressionResult fit_panel_regression(const RegressionSpec& spec,
                                      const std::vector<DerivedPoint>& points) {
  std::vector<SampleRow> sample = build_sample(spec, points);
  if (sample.empty()) throw EstimationError("screened sample is empty");
  const auto n = static_cast<Eigen::Index>(sample.size());

  std::vector<int> cids = dense_ids(sample, true);
  std::vector<int> yids = dense_ids(sample, false);
  const int n_countries = count_groups(cids);
  const int n_years = count_groups(yids);
  if (spec.country_fe && n_countries < 2)
    throw EstimationError("country fixed effects need at least 2 countries");
  if (spec.year_fe && n_years < 2)
    throw EstimationError("year fixed effects need at least 2 years");

  // Columns: intercept, regressor, then dummies with the first-listed
  // country/year dropped as baseline.
  const Eigen::Index p = 2 + (spec.country_fe ? n_countries - 1 : 0) +
                         (spec.year_fe ? n_years - 1 : 0);
  if (n - p < 1)
    throw EstimationError("no residual degrees of freedom");

  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, p);
  Eigen::VectorXd response(n), weights(n);
  std::vector<std::string> names;
  names.reserve(p);
  names.emplace_back("(intercept)");
  names.emplace_back(regressor_name(spec.regressor));
  std::map<std::string, int> country_col;
  std::map<int, int> year_col;
  {
    std::map<std::string, int> countries;
    std::map<int, int> years;
    for (const SampleRow& row : sample) {
      countries.emplace(row.country, 0);
      years.emplace(row.year, 0);
    }
    int next = 2;
    if (spec.country_fe) {
      bool first = true;
      for (auto& [code, unused] : countries) {
        if (first) { first = false; continue; }  // baseline
        country_col[code] = next;
        names.push_back("country:" + code);
        ++next;
      }
    }
    if (spec.year_fe) {
      bool first = true;
      for (auto& [year, unused] : years) {
        if (first) { first = false; continue; }
        year_col[year] = next;
        names.push_back("year:" + std::to_string(year));
        ++next;
      }
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const SampleRow& row = sample[i];
    design(i, 0) = 1.0;
    design(i, 1) = row.x;
    if (spec.country_fe) {
      auto it = country_col.find(row.country);
      if (it != country_col.end()) design(i, it->second) = 1.0;
    }
    if (spec.year_fe) {
      auto it = year_col.find(row.year);
      if (it != year_col.end()) design(i, it->second) = 1.0;
    }
    response[i] = row.y;
    weights[i] = row.w;
  }

  Eigen::VectorXd beta =
      solve_weighted_least_squares(design, response, weights, names);

  Eigen::VectorXd residuals = response - design * beta;
  const double dof = static_cast<double>(n - p);

  // Covariance bread from the weighted cross-product; the solve itself went
  // through QR above.
  Eigen::MatrixXd xtwx = design.transpose() * weights.asDiagonal() * design;
  Eigen::MatrixXd bread = xtwx.ldlt().solve(Eigen::MatrixXd::Identity(p, p));

  double weighted_ssr = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    weighted_ssr += weights[i] * residuals[i] * residuals[i];
  const double sigma2 = weighted_ssr / dof;

  RegressionResult result;
  result.coefficient = beta[1];
  result.n_obs = static_cast<int>(n);
  result.se_classical = std::sqrt(sigma2 * bread(1, 1));

  // CR1 country-clustered sandwich.
  {
    std::map<std::string, Eigen::VectorXd> cluster_scores;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto it = cluster_scores.try_emplace(sample[i].country,
                                           Eigen::VectorXd::Zero(p)).first;
      it->second += weights[i] * residuals[i] * design.row(i).transpose();
    }
    const auto n_clusters = static_cast<double>(cluster_scores.size());
    if (n_clusters < 2) {
      result.se_cluster_country = result.se_classical;
    } else {
      Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
      for (const auto& [code, score] : cluster_scores)
        meat += score * score.transpose();
      const double cr1 = n_clusters / (n_clusters - 1.0) *
                         (static_cast<double>(n) - 1.0) / dof;
      Eigen::MatrixXd cov = cr1 * bread * meat * bread;
      result.se_cluster_country = std::sqrt(cov(1, 1));
    }
  }

  // Overall R^2 against the weighted mean, fitted values including the
  // fixed effects.
  {
    double wsum = weights.sum();
    double ybar = weights.dot(response) / wsum;
    double sst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double dev = response[i] - ybar;
      sst += weights[i] * dev * dev;
    }
    result.r2 = ratio_r2(weighted_ssr, sst);
  }

  WithinStats within = within_fit(sample, spec.country_fe, spec.year_fe);
  result.r2_within = ratio_r2(within.ssr, within.sst);
  return result;
}

std::string regression_result_kv(const RegressionResult& result) {
  std::string out;
  out += "coefficient " + format_double(result.coefficient) + "\n";
  out += "se_classical " + format_double(result.se_classical) + "\n";
  out += "se_cluster_country " + format_double(result.se_cluster_country) + "\n";
  out += "n_obs " + std::to_string(result.n_obs) + "\n";
  out += "r2 " + format_double(result.r2) + "\n";
  out += "r2_within " + format_double(result.r2_within) + "\n";
  return out;
}

}  // namespace thetac
