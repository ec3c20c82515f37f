#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "thetac/panel.hpp"

namespace thetac {

enum class ScenarioKind { Thrift, FreeGrowth, Balanced };

// Parameters for one synthetic country panel. Paths are transition-indexed:
// entry t drives the move from year t to year t+1, so their length is
// n_years - 1. With noise_sd = 0 the output is bitwise deterministic
// regardless of seed.
struct ScenarioParams {
  ScenarioKind kind = ScenarioKind::Thrift;
  std::string country_code = "SIM";
  int start_year = 2000;
  int n_years = 3;
  double k0 = 100.0;          // initial capital, > 0
  double v = 0.9;             // net output / capital ratio (Thrift)
  std::vector<double> saving_path;  // S_net per transition (Thrift)
  std::vector<double> growth_path;  // exogenous g per transition (FreeGrowth)
  double c_star_const = 0.6;  // consumption ratio (FreeGrowth / Balanced)
  double balanced_rate = 0.0; // common growth rate (Balanced)
  double gdp_ratio = 0.5;     // GDP emitted as gdp_ratio * K
  std::uint64_t seed = 0;
  double noise_sd = 0.0;      // multiplicative lognormal noise on K and C
};

// Saving-driven growth: capital increases exactly by the saving path, income
// is v*K, and the recorded saving rate equals the capital growth rate, so
// c* + g stays at the constant v. Every theta_c with a nonzero denominator is
// then 1 up to roundoff.
CountryPanel simulate_thrift(const ScenarioParams& params);

// Exogenous varying growth with a constant consumption ratio: delta_c* is 0,
// so every theta_c is 0 up to roundoff.
CountryPanel simulate_free_growth(const ScenarioParams& params);

// K and C both grow at the constant balanced_rate: the growth rate never
// changes, so no theta_c observation survives any positive screen.
CountryPanel simulate_balanced(const ScenarioParams& params);

CountryPanel simulate(const ScenarioParams& params);

// Saving rate the accounts imply under net output v*K: s* = v - C/K.
// Pairs with growth_rate_series for checking g = s* on thrift panels.
YearSeries implied_saving_rate_series(const CountryPanel& panel, double v);

// Plain-text key=value scenario file, one pair per line, '#' comments.
// Lists (saving_path, growth_path) are comma-separated.
ScenarioParams parse_scenario_params(std::istream& in,
                                     const std::string& source_name);
ScenarioParams parse_scenario_file(const std::string& path);

}  // namespace thetac
