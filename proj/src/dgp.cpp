#include "thetac/dgp.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>

#include "thetac/errors.hpp"
#include "thetac/text.hpp"

namespace thetac {

namespace {

// Counter-based noise stream (splitmix64 mixing): one draw is a pure
// function of (seed, counter), so generation is order-independent.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t bits = mix64(seed ^ mix64(counter));
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
}

double standard_normal(std::uint64_t seed, std::uint64_t counter) {
  double u1 = uniform01(seed, 2 * counter);
  double u2 = uniform01(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

void validate_common(const ScenarioParams& params) {
  if (params.n_years < 3)
    throw InputError("scenario: n_years must be at least 3");
  if (!(params.k0 > 0.0) || !std::isfinite(params.k0))
    throw InputError("scenario: k0 must be positive");
  if (params.gdp_ratio <= 0.0)
    throw InputError("scenario: gdp_ratio must be positive");
  if (params.noise_sd < 0.0)
    throw InputError("scenario: noise_sd must be nonnegative");
}

CountryPanel assemble(const ScenarioParams& params,
                      const std::vector<double>& capital,
                      const std::vector<double>& consumption) {
  CountryPanel panel;
  panel.country_code = params.country_code;
  panel.rows.reserve(capital.size());
  for (std::size_t t = 0; t < capital.size(); ++t) {
    PanelRow row;
    row.year = params.start_year + static_cast<int>(t);
    row.capital = capital[t];
    row.consumption = consumption[t];
    if (params.noise_sd > 0.0) {
      row.capital *= std::exp(params.noise_sd *
                              standard_normal(params.seed, 2 * t));
      row.consumption *= std::exp(params.noise_sd *
                                  standard_normal(params.seed, 2 * t + 1));
    }
    row.gdp = params.gdp_ratio * capital[t];  // noise never touches the weight
    panel.rows.push_back(row);
  }
  return panel;
}

}  // namespace

CountryPanel simulate_thrift(const ScenarioParams& params) {
  validate_common(params);
  const auto transitions = static_cast<std::size_t>(params.n_years - 1);
  if (params.saving_path.size() != transitions)
    throw InputError("thrift scenario: saving_path must have n_years-1 entries");
  if (params.v <= 0.0)
    throw InputError("thrift scenario: v must be positive");

  std::vector<double> capital(params.n_years);
  capital[0] = params.k0;
  for (std::size_t t = 0; t < transitions; ++t) {
    capital[t + 1] = capital[t] + params.saving_path[t];
    if (!(capital[t + 1] > 0.0))
      throw InputError("thrift scenario: capital would go nonpositive at year " +
                       std::to_string(params.start_year + static_cast<int>(t) + 1));
  }

  // Recorded saving rate equals the panel's backward growth rate; the first
  // year, which has no backward rate, uses its forward one.
  std::vector<double> consumption(params.n_years);
  for (int t = 0; t < params.n_years; ++t) {
    double rate = t == 0 ? params.saving_path[0] / capital[0]
                         : (capital[t] - capital[t - 1]) / capital[t - 1];
    double c_star = params.v - rate;
    if (!(c_star > 0.0))
      throw InputError("thrift scenario: consumption would go nonpositive at year " +
                       std::to_string(params.start_year + t));
    consumption[t] = c_star * capital[t];
  }
  return assemble(params, capital, consumption);
}

CountryPanel simulate_free_growth(const ScenarioParams& params) {
  validate_common(params);
  const auto transitions = static_cast<std::size_t>(params.n_years - 1);
  if (params.growth_path.size() != transitions)
    throw InputError(
        "free-growth scenario: growth_path must have n_years-1 entries");
  if (params.c_star_const < 0.0)
    throw InputError("free-growth scenario: c_star_const must be nonnegative");

  std::vector<double> capital(params.n_years);
  std::vector<double> consumption(params.n_years);
  capital[0] = params.k0;
  for (std::size_t t = 0; t < transitions; ++t) {
    if (1.0 + params.growth_path[t] <= 0.0)
      throw InputError("free-growth scenario: growth rate at or below -100%");
    capital[t + 1] = capital[t] + capital[t] * params.growth_path[t];
  }
  for (int t = 0; t < params.n_years; ++t)
    consumption[t] = params.c_star_const * capital[t];
  return assemble(params, capital, consumption);
}

CountryPanel simulate_balanced(const ScenarioParams& params) {
  validate_common(params);
  if (1.0 + params.balanced_rate <= 0.0)
    throw InputError("balanced scenario: rate at or below -100%");
  if (params.c_star_const < 0.0)
    throw InputError("balanced scenario: c_star_const must be nonnegative");

  std::vector<double> capital(params.n_years);
  std::vector<double> consumption(params.n_years);
  capital[0] = params.k0;
  consumption[0] = params.c_star_const * params.k0;
  for (int t = 1; t < params.n_years; ++t) {
    capital[t] = capital[t - 1] + capital[t - 1] * params.balanced_rate;
    consumption[t] = consumption[t - 1] + consumption[t - 1] * params.balanced_rate;
  }
  return assemble(params, capital, consumption);
}

CountryPanel simulate(const ScenarioParams& params) {
  switch (params.kind) {
    case ScenarioKind::Thrift: return simulate_thrift(params);
    case ScenarioKind::FreeGrowth: return simulate_free_growth(params);
    case ScenarioKind::Balanced: return simulate_balanced(params);
  }
  throw InputError("scenario: unknown kind");
}

YearSeries implied_saving_rate_series(const CountryPanel& panel, double v) {
  YearSeries out;
  out.reserve(panel.rows.size());
  for (const PanelRow& row : panel.rows)
    out.emplace_back(row.year, v - row.consumption / row.capital);
  return out;
}

ScenarioParams parse_scenario_params(std::istream& in,
                                     const std::string& source_name) {
  ScenarioParams params;
  std::string line;
  std::size_t line_no = 0;
  bool saw_any = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw InputError(source_name + ":" + std::to_string(line_no) +
                       ": expected key=value");
    std::string key(trim(text.substr(0, eq)));
    std::string_view value = trim(text.substr(eq + 1));
    saw_any = true;

    auto bad = [&](const std::string& what) {
      return InputError(source_name + ":" + std::to_string(line_no) + ": bad " +
                        what + " '" + std::string(value) + "'");
    };
    auto as_double = [&]() {
      auto parsed = parse_double(value);
      if (!parsed) throw bad(key);
      return *parsed;
    };
    auto as_int = [&]() {
      auto parsed = parse_int(value);
      if (!parsed) throw bad(key);
      return *parsed;
    };
    auto as_path = [&]() {
      std::vector<double> path;
      for (std::string_view item : split(value, ',')) {
        auto parsed = parse_double(item);
        if (!parsed) throw bad(key);
        path.push_back(*parsed);
      }
      return path;
    };

    if (key == "kind") {
      if (value == "thrift") params.kind = ScenarioKind::Thrift;
      else if (value == "free_growth" || value == "free-growth")
        params.kind = ScenarioKind::FreeGrowth;
      else if (value == "balanced") params.kind = ScenarioKind::Balanced;
      else throw bad("kind");
    } else if (key == "country") {
      params.country_code = std::string(value);
    } else if (key == "start_year") {
      params.start_year = as_int();
    } else if (key == "n_years") {
      params.n_years = as_int();
    } else if (key == "k0") {
      params.k0 = as_double();
    } else if (key == "v") {
      params.v = as_double();
    } else if (key == "saving_path") {
      params.saving_path = as_path();
    } else if (key == "growth_path") {
      params.growth_path = as_path();
    } else if (key == "c_star_const") {
      params.c_star_const = as_double();
    } else if (key == "balanced_rate") {
      params.balanced_rate = as_double();
    } else if (key == "gdp_ratio") {
      params.gdp_ratio = as_double();
    } else if (key == "seed") {
      params.seed = static_cast<std::uint64_t>(as_int());
    } else if (key == "noise_sd") {
      params.noise_sd = as_double();
    } else {
      throw InputError(source_name + ":" + std::to_string(line_no) +
                       ": unknown key '" + key + "'");
    }
  }
  if (!saw_any) throw InputError(source_name + ": empty scenario file");
  return params;
}

ScenarioParams parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file: " + path);
  return parse_scenario_params(in, path);
}

}  // namespace thetac
