#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thetac/estimators.hpp"
#include "thetac/panel.hpp"
#include "thetac/wid.hpp"

namespace thetac {

// Options shared by the analysis subcommands.
struct RunConfig {
  std::vector<std::string> inputs;  // raw WID files or canonical panel files
  double screen_threshold = 0.01;
  ScreenVariable screen_variable = ScreenVariable::DeltaGrowthRate;
  WeightKind weights = WeightKind::Gdp;
  std::string out_dir = ".";
  std::vector<std::string> include_countries;  // empty means all
  std::vector<std::string> exclude_countries;
  std::optional<int> year_min;
  std::optional<int> year_max;
  VariableMap variable_map;  // for raw WID inputs
};

// Reads every input (format auto-detected per file), merges rows per country,
// and applies the country/year filters. Throws InputError when nothing
// usable remains.
std::vector<CountryPanel> load_panels(const RunConfig& config);

// derive_points over all panels, concatenated in (country, year) order.
std::vector<DerivedPoint> derive_all(const std::vector<CountryPanel>& panels,
                                     const ScreenConfig& screen);

// `country,year,g,c_star,delta_g,delta_c_star,theta_c,passes_screen`;
// absent values are empty fields, full precision otherwise.
std::string render_derived_csv(const std::vector<DerivedPoint>& points);

struct ReportResult {
  RegressionResult level;  // -c* on g,  screen |g|
  RegressionResult delta;  // -dc* on dg, screen |dg|
  std::optional<double> pooled_theta;
  int pooled_n_obs = 0;
  std::vector<CountrySummary> summaries;  // sorted by display name
  std::vector<YearlyTheta> yearly;
};

ReportResult compute_report(const std::vector<CountryPanel>& panels,
                            const RunConfig& config);

// Human tables round half-to-even at print time: 3 decimals for regression
// statistics, 2 for theta_c.
std::string render_table1(const RegressionResult& level,
                          const RegressionResult& delta, double threshold,
                          WeightKind weights);
std::string render_table2(const std::vector<CountrySummary>& summaries,
                          double threshold);
std::string render_figure1_csv(const std::vector<YearlyTheta>& series);
std::string render_figure1_svg(const std::vector<YearlyTheta>& series);

// Writes derived.csv into config.out_dir.
void cmd_derive(const RunConfig& config);

// Writes table1.txt, table2.txt, figure1.csv, figure1.svg, regression kv
// files, theta.kv, country_theta.csv, and manifest.txt into config.out_dir.
// Only the manifest carries a timestamp; everything else is byte-stable.
void cmd_report(const RunConfig& config);

}  // namespace thetac
