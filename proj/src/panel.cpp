#include "thetac/panel.hpp"

#include <algorithm>
#include <cmath>

#include "thetac/errors.hpp"

namespace thetac {

namespace {

bool usable(const std::optional<double>& field) {
  return field.has_value() && std::isfinite(*field);
}

}  // namespace

CountryPanel build_country_panel(std::string country_code,
                                 std::vector<RawPanelRow> rows) {
  if (rows.empty())
    throw InputError("country " + country_code + ": no input rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const RawPanelRow& a, const RawPanelRow& b) {
                     return a.year < b.year;
                   });

  CountryPanel panel;
  panel.country_code = std::move(country_code);
  for (const RawPanelRow& raw : rows) {
    // A year survives only when all three of K, C, GDP are present and finite.
    if (!usable(raw.capital) || !usable(raw.consumption) || !usable(raw.gdp))
      continue;

    PanelRow row{raw.year, *raw.capital, *raw.consumption, *raw.gdp};
    if (row.capital <= 0.0)
      throw InputError("country " + panel.country_code + " year " +
                       std::to_string(row.year) + ": nonpositive capital");
    if (row.consumption < 0.0)
      throw InputError("country " + panel.country_code + " year " +
                       std::to_string(row.year) + ": negative consumption");
    if (row.gdp < 0.0)
      throw InputError("country " + panel.country_code + " year " +
                       std::to_string(row.year) + ": negative GDP");

    if (!panel.rows.empty() && panel.rows.back().year == row.year) {
      const PanelRow& kept = panel.rows.back();
      if (kept.capital == row.capital && kept.consumption == row.consumption &&
          kept.gdp == row.gdp)
        continue;  // identical duplicate
      throw InputError("country " + panel.country_code + " year " +
                       std::to_string(row.year) +
                       ": duplicate year with conflicting values");
    }
    panel.rows.push_back(row);
  }
  return panel;
}

YearSeries growth_rate_series(const CountryPanel& panel) {
  YearSeries out;
  for (std::size_t i = 1; i < panel.rows.size(); ++i) {
    const PanelRow& prev = panel.rows[i - 1];
    const PanelRow& cur = panel.rows[i];
    if (cur.year != prev.year + 1) continue;  // gaps break the chain
    out.emplace_back(cur.year, (cur.capital - prev.capital) / prev.capital);
  }
  return out;
}

YearSeries consumption_ratio_series(const CountryPanel& panel) {
  YearSeries out;
  out.reserve(panel.rows.size());
  for (const PanelRow& row : panel.rows)
    out.emplace_back(row.year, row.consumption / row.capital);
  return out;
}

YearSeries first_difference(const YearSeries& series) {
  YearSeries out;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].first != series[i - 1].first + 1) continue;
    out.emplace_back(series[i].first, series[i].second - series[i - 1].second);
  }
  return out;
}

bool passes_screen(const DerivedPoint& point, const ScreenConfig& screen) {
  switch (screen.variable) {
    case ScreenVariable::GrowthRate:
      // Consumer is the level regression of -c* on g: g must exist.
      return point.growth.has_value() &&
             std::fabs(*point.growth) >= screen.threshold;
    case ScreenVariable::DeltaGrowthRate:
      // Consumer needs theta_c, which implies delta_growth and delta_c_star.
      return point.theta_c.has_value() &&
             std::fabs(*point.delta_growth) >= screen.threshold;
  }
  return false;
}

std::vector<DerivedPoint> derive_points(const CountryPanel& panel,
                                        const ScreenConfig& screen) {
  if (!(screen.threshold >= 0.0) || !std::isfinite(screen.threshold))
    throw InputError("screen threshold must be finite and nonnegative");
  const YearSeries growth = growth_rate_series(panel);
  const YearSeries ratio = consumption_ratio_series(panel);
  const YearSeries delta_growth = first_difference(growth);
  const YearSeries delta_ratio = first_difference(ratio);

  auto lookup = [](const YearSeries& series, int year) -> std::optional<double> {
    for (const auto& [y, v] : series)
      if (y == year) return v;
    return std::nullopt;
  };

  std::vector<DerivedPoint> points;
  points.reserve(panel.rows.size());
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    const PanelRow& row = panel.rows[i];
    DerivedPoint point;
    point.country_code = panel.country_code;
    point.year = row.year;
    point.c_star = ratio[i].second;
    point.gdp = row.gdp;
    point.growth = lookup(growth, row.year);
    point.delta_growth = lookup(delta_growth, row.year);
    point.delta_c_star = lookup(delta_ratio, row.year);
    if (point.delta_growth && point.delta_c_star && *point.delta_growth != 0.0)
      point.theta_c = -*point.delta_c_star / *point.delta_growth;
    point.passes_screen = passes_screen(point, screen);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace thetac
