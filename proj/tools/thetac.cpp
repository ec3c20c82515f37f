// thetac: ingest national-accounts panels, derive thrift-index observations,
// and fit the GDP-weighted two-way fixed-effects regressions behind them.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include "thetac/country_names.hpp"
#include "thetac/dgp.hpp"
#include "thetac/errors.hpp"
#include "thetac/estimators.hpp"
#include "thetac/fetch.hpp"
#include "thetac/panel_io.hpp"
#include "thetac/report.hpp"
#include "thetac/text.hpp"
#include "thetac/version.hpp"

namespace fs = std::filesystem;
using namespace thetac;

namespace {

struct CliOptions {
  RunConfig run;
  std::string years_range;      // "a..b"
  std::string weights = "gdp";  // gdp | none
  std::string screen_var = "dg";

  // fetch
  std::string cache_dir;
  std::string base_url = "https://wid.world/bz2";
  std::vector<std::string> fetch_countries{"all"};
  bool refresh = false;
  bool offline = false;

  // regress
  std::string column = "delta";  // level | delta
  bool no_country_fe = false;
  bool no_year_fe = false;

  // simulate
  std::vector<std::string> scenario_files;
};

void finalize_run_config(CliOptions& opt) {
  if (!opt.years_range.empty()) {
    std::string_view range(opt.years_range);
    auto pos = range.find("..");
    if (pos == std::string_view::npos)
      throw InputError("--years expects a..b, got '" + opt.years_range + "'");
    auto lo = trim(range.substr(0, pos));
    auto hi = trim(range.substr(pos + 2));
    if (!lo.empty()) {
      auto year = parse_int(lo);
      if (!year) throw InputError("bad year '" + std::string(lo) + "'");
      opt.run.year_min = *year;
    }
    if (!hi.empty()) {
      auto year = parse_int(hi);
      if (!year) throw InputError("bad year '" + std::string(hi) + "'");
      opt.run.year_max = *year;
    }
  }
  if (opt.weights == "gdp") opt.run.weights = WeightKind::Gdp;
  else if (opt.weights == "none") opt.run.weights = WeightKind::None;
  else throw InputError("--weights expects gdp or none");

  if (opt.screen_var == "dg")
    opt.run.screen_variable = ScreenVariable::DeltaGrowthRate;
  else if (opt.screen_var == "g")
    opt.run.screen_variable = ScreenVariable::GrowthRate;
  else
    throw InputError("--screen-var expects dg or g");
}

void add_analysis_options(CLI::App* cmd, CliOptions& opt,
                          bool with_screen_var = false) {
  cmd->add_option("--input", opt.run.inputs,
                  "input files: WID bulk exports or canonical panels")
      ->required();
  cmd->add_option("--screen", opt.run.screen_threshold,
                  "screen threshold (default 0.01)");
  cmd->add_option("--weights", opt.weights, "gdp|none (default gdp)");
  cmd->add_option("--countries", opt.run.include_countries,
                  "restrict to these country codes")
      ->delimiter(',');
  cmd->add_option("--exclude-countries", opt.run.exclude_countries,
                  "drop these country codes")
      ->delimiter(',');
  cmd->add_option("--years", opt.years_range, "year range a..b, inclusive");
  cmd->add_option("--percentile", opt.run.variable_map.percentile_filter,
                  "WID percentile filter (default p0p100)");
  cmd->add_option("--out", opt.run.out_dir, "output directory (default .)");
  if (with_screen_var)
    cmd->add_option("--screen-var", opt.screen_var,
                    "screened variable: dg|g (default dg)");
}

int run_fetch(const CliOptions& opt) {
  FetchConfig config;
  config.base_url = opt.base_url;
  config.cache_dir = opt.cache_dir;
  config.refresh = opt.refresh;

  std::vector<std::string> countries = opt.fetch_countries;
  if (countries.size() == 1 && countries[0] == "all")
    countries = all_country_codes();

  if (opt.offline) {
    // Cache-only pass: report what is present, fail on any miss.
    auto manifest = read_cache_manifest(config.cache_dir);
    for (const std::string& country : countries) {
      std::string url = wid_country_url(config.base_url, country);
      bool hit = false;
      for (const ManifestEntry& e : manifest)
        if (e.url == url &&
            fs::exists(config.cache_dir / e.rel_path)) {
          std::cout << country << " cached " << (config.cache_dir / e.rel_path).string()
                    << "\n";
          hit = true;
          break;
        }
      if (!hit)
        throw NetworkError("offline mode and no cached copy for " + url);
    }
    return 0;
  }

  const bool implicit_all =
      opt.fetch_countries.size() == 1 && opt.fetch_countries[0] == "all";
  std::size_t missing = 0;
  for (const std::string& country : countries) {
    std::vector<FetchedFile> files;
    try {
      files = fetch_wid_bulk(config, {country});
    } catch (const NetworkError& err) {
      // The bundled "all" list is broader than what WID publishes; a 404
      // there is a gap, not a failure. Explicit country lists stay strict.
      if (implicit_all &&
          std::string(err.what()).find("HTTP 404") != std::string::npos) {
        std::cout << "missing " << country << " (HTTP 404)\n";
        ++missing;
        continue;
      }
      throw;
    }
    for (const FetchedFile& f : files)
      std::cout << (f.from_cache ? "cached " : "fetched ") << f.url << " -> "
                << f.path.string() << "\n";
  }
  if (missing > 0)
    std::cout << missing << " countries not published at the source\n";
  return 0;
}

int run_ingest(const CliOptions& opt) {
  std::vector<CountryPanel> panels = load_panels(opt.run);
  fs::create_directories(opt.run.out_dir);
  fs::path out = fs::path(opt.run.out_dir) / "panels.csv";
  write_panels_file(out.string(), panels);
  std::size_t rows = 0;
  for (const CountryPanel& p : panels) rows += p.rows.size();
  std::cout << "wrote " << out.string() << ": " << panels.size()
            << " countries, " << rows << " country-years\n";
  return 0;
}

int run_theta(const CliOptions& opt) {
  std::vector<CountryPanel> panels = load_panels(opt.run);
  const ScreenConfig screen{ScreenVariable::DeltaGrowthRate,
                            opt.run.screen_threshold};
  std::vector<DerivedPoint> points = derive_all(panels, screen);
  if (opt.run.weights == WeightKind::None)
    for (DerivedPoint& p : points) p.gdp = 1.0;

  auto pooled = pooled_weighted_theta(points);
  if (!pooled) throw EstimationError("no screened theta_c observations");

  int n_obs = 0;
  std::set<std::string> countries;
  for (const DerivedPoint& p : points)
    if (p.passes_screen && p.theta_c) {
      ++n_obs;
      countries.insert(p.country_code);
    }
  std::cout << "pooled_weighted_theta " << format_double(*pooled) << "\n";
  std::cout << "n_obs " << n_obs << "\n";
  std::cout << "n_countries " << countries.size() << "\n";
  return 0;
}

int run_regress(const CliOptions& opt) {
  std::vector<CountryPanel> panels = load_panels(opt.run);
  RegressionSpec spec;
  if (opt.column == "level") {
    spec.response = ResponseKind::NegCStar;
    spec.regressor = RegressorKind::GrowthRate;
    spec.screen = {ScreenVariable::GrowthRate, opt.run.screen_threshold};
  } else if (opt.column == "delta") {
    spec.response = ResponseKind::NegDeltaCStar;
    spec.regressor = RegressorKind::DeltaGrowthRate;
    spec.screen = {ScreenVariable::DeltaGrowthRate, opt.run.screen_threshold};
  } else {
    throw InputError("--column expects level or delta");
  }
  spec.weights = opt.run.weights;
  spec.country_fe = !opt.no_country_fe;
  spec.year_fe = !opt.no_year_fe;

  ScreenConfig derive_screen{ScreenVariable::DeltaGrowthRate,
                             opt.run.screen_threshold};
  std::vector<DerivedPoint> points = derive_all(panels, derive_screen);
  RegressionResult result = fit_panel_regression(spec, points);
  std::cout << regression_result_kv(result);
  return 0;
}

int run_simulate(const CliOptions& opt) {
  std::vector<CountryPanel> panels;
  std::set<std::string> seen;
  for (const std::string& file : opt.scenario_files) {
    panels.push_back(simulate(parse_scenario_file(file)));
    if (!seen.insert(panels.back().country_code).second)
      throw InputError("duplicate country code '" +
                       panels.back().country_code + "' across scenario files");
  }
  fs::create_directories(opt.run.out_dir);
  fs::path out = fs::path(opt.run.out_dir) / "panels.csv";
  write_panels_file(out.string(), panels);
  std::cout << "wrote " << out.string() << ": " << panels.size()
            << " simulated panels\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thrift-index (theta_c) measurement from national accounts"};
  app.set_version_flag("--version", std::string("thetac ") + kVersion);
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* fetch = app.add_subcommand(
      "fetch", "download WID bulk files into a content-addressed cache");
  fetch->add_option("--cache", opt.cache_dir, "cache directory")->required();
  fetch->add_option("--countries", opt.fetch_countries,
                    "country codes or 'all' (default all)")
      ->delimiter(',');
  fetch->add_option("--base-url", opt.base_url, "download base URL");
  fetch->add_flag("--refresh", opt.refresh, "re-download even on cache hits");
  fetch->add_flag("--offline", opt.offline, "only verify the cache");

  CLI::App* ingest = app.add_subcommand(
      "ingest", "assemble WID exports into canonical country,year,K,C,GDP panels");
  add_analysis_options(ingest, opt);

  CLI::App* derive = app.add_subcommand(
      "derive", "derive g, c*, dg, dc*, theta_c per country-year");
  add_analysis_options(derive, opt, /*with_screen_var=*/true);

  CLI::App* theta = app.add_subcommand(
      "theta", "pooled GDP-weighted theta_c over the screened sample");
  add_analysis_options(theta, opt);

  CLI::App* regress = app.add_subcommand(
      "regress", "one regression column as flat key-value output");
  add_analysis_options(regress, opt);
  regress->add_option("--column", opt.column, "level|delta (default delta)");
  regress->add_flag("--no-country-fe", opt.no_country_fe,
                    "drop country fixed effects");
  regress->add_flag("--no-year-fe", opt.no_year_fe, "drop year fixed effects");

  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "generate synthetic panels from scenario parameter files");
  simulate_cmd->add_option("--params", opt.scenario_files,
                           "key=value scenario files")
      ->required();
  simulate_cmd->add_option("--out", opt.run.out_dir,
                           "output directory (default .)");

  CLI::App* report = app.add_subcommand(
      "report", "full pipeline: tables, figure series, and result files");
  add_analysis_options(report, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    finalize_run_config(opt);
    if (fetch->parsed()) return run_fetch(opt);
    if (ingest->parsed()) return run_ingest(opt);
    if (derive->parsed()) {
      cmd_derive(opt.run);
      std::cout << "wrote "
                << (fs::path(opt.run.out_dir) / "derived.csv").string() << "\n";
      return 0;
    }
    if (theta->parsed()) return run_theta(opt);
    if (regress->parsed()) return run_regress(opt);
    if (simulate_cmd->parsed()) return run_simulate(opt);
    if (report->parsed()) {
      cmd_report(opt.run);
      std::cout << "report written to " << opt.run.out_dir << "\n";
      return 0;
    }
  } catch (const NetworkError& e) {
    std::cerr << "network error: " << e.what() << "\n";
    return 4;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
