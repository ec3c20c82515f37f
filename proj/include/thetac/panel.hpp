#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace thetac {

// One country-year row of the canonical national-accounts panel,
// in constant currency units.
struct PanelRow {
  int year = 0;
  double capital = 0.0;      // K, market-value capital (> 0)
  double consumption = 0.0;  // C (>= 0)
  double gdp = 0.0;          // GDP, used only for weighting (>= 0)
};

// Raw input row; a field left empty (or non-finite) marks it missing.
struct RawPanelRow {
  int year = 0;
  std::optional<double> capital;
  std::optional<double> consumption;
  std::optional<double> gdp;
};

// Sorted annual series for one country.
// Invariants: years strictly increasing; every K > 0; C, GDP >= 0 and finite.
struct CountryPanel {
  std::string country_code;
  std::vector<PanelRow> rows;
};

enum class ScreenVariable { GrowthRate, DeltaGrowthRate };

// Small-denominator screen: a point passes when the screened variable's
// magnitude is at least `threshold` and everything its consumer needs exists.
struct ScreenConfig {
  ScreenVariable variable = ScreenVariable::DeltaGrowthRate;
  double threshold = 0.01;
};

// Derived quantities for one country-year. Absence is explicit: theta_c is
// never emitted as infinity or NaN.
struct DerivedPoint {
  std::string country_code;
  int year = 0;
  std::optional<double> growth;        // g = (K_t - K_{t-1}) / K_{t-1}
  double c_star = 0.0;                 // C_t / K_t
  std::optional<double> delta_growth;  // g_t - g_{t-1}, consecutive years only
  std::optional<double> delta_c_star;  // c*_t - c*_{t-1}
  std::optional<double> theta_c;       // -delta_c_star / delta_growth
  double gdp = 0.0;                    // observation-year GDP, the weight
  bool passes_screen = false;
};

using YearSeries = std::vector<std::pair<int, double>>;

// Validates and normalizes raw rows into a panel: sorts by year, drops rows
// with a missing or non-finite K/C/GDP, dedupes identical duplicate years.
// Throws InputError on conflicting duplicates or on K <= 0, C < 0, GDP < 0.
CountryPanel build_country_panel(std::string country_code,
                                 std::vector<RawPanelRow> rows);

// g_t = (K_t - K_{t-1}) / K_{t-1}, only where year t-1 is present.
// Calendar gaps break the chain; no multi-year growth rates are formed.
YearSeries growth_rate_series(const CountryPanel& panel);

// c*_t = C_t / K_t for every year of the panel.
YearSeries consumption_ratio_series(const CountryPanel& panel);

// delta_t = v_t - v_{t-1}, only across consecutive calendar years.
YearSeries first_difference(const YearSeries& series);

bool passes_screen(const DerivedPoint& point, const ScreenConfig& screen);

// Full derivation chain for one panel, evaluated against `screen`.
// theta_c is present iff delta_growth and delta_c_star exist and
// delta_growth != 0.
std::vector<DerivedPoint> derive_points(const CountryPanel& panel,
                                        const ScreenConfig& screen);

}  // namespace thetac
