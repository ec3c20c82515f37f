#include "thetac/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>

#include "thetac/country_names.hpp"
#include "thetac/errors.hpp"
#include "thetac/panel_io.hpp"
#include "thetac/sha256.hpp"
#include "thetac/text.hpp"
#include "thetac/version.hpp"

namespace fs = std::filesystem;

namespace thetac {

namespace {

bool listed(const std::vector<std::string>& list, const std::string& code) {
  return std::find(list.begin(), list.end(), code) != list.end();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Width in display columns, not bytes; table2 names are UTF-8.
std::size_t utf8_width(const std::string& s) {
  std::size_t width = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++width;
  return width;
}

std::string utc_timestamp() {
  auto now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<CountryPanel> load_panels(const RunConfig& config) {
  if (config.inputs.empty()) throw InputError("no input files given");

  std::map<std::string, std::vector<RawPanelRow>> rows_by_country;
  std::vector<RawObservation> wid_observations;

  auto absorb = [&](const CountryPanel& panel) {
    auto& rows = rows_by_country[panel.country_code];
    for (const PanelRow& row : panel.rows)
      rows.push_back({row.year, row.capital, row.consumption, row.gdp});
  };

  for (const std::string& input : config.inputs) {
    std::ifstream probe(input);
    if (!probe) throw InputError("cannot open input file: " + input);
    std::string header;
    std::getline(probe, header);
    probe.close();

    if (is_canonical_panel_header(header)) {
      for (const CountryPanel& panel : read_panels_file(input)) absorb(panel);
    } else {
      WidParseResult parsed = parse_wid_file(input);
      wid_observations.insert(wid_observations.end(),
                              parsed.observations.begin(),
                              parsed.observations.end());
    }
  }
  if (!wid_observations.empty())
    for (const CountryPanel& panel :
         assemble_dataset(wid_observations, config.variable_map))
      absorb(panel);

  std::vector<CountryPanel> panels;
  for (auto& [code, rows] : rows_by_country) {
    if (!config.include_countries.empty() &&
        !listed(config.include_countries, code))
      continue;
    if (listed(config.exclude_countries, code)) continue;
    if (config.year_min || config.year_max) {
      std::erase_if(rows, [&](const RawPanelRow& row) {
        return (config.year_min && row.year < *config.year_min) ||
               (config.year_max && row.year > *config.year_max);
      });
    }
    if (rows.empty()) continue;
    CountryPanel panel = build_country_panel(code, std::move(rows));
    if (!panel.rows.empty()) panels.push_back(std::move(panel));
  }
  if (panels.empty()) throw InputError("no input panels after filtering");
  return panels;
}

std::vector<DerivedPoint> derive_all(const std::vector<CountryPanel>& panels,
                                     const ScreenConfig& screen) {
  std::vector<DerivedPoint> all;
  for (const CountryPanel& panel : panels) {
    std::vector<DerivedPoint> points = derive_points(panel, screen);
    all.insert(all.end(), std::make_move_iterator(points.begin()),
               std::make_move_iterator(points.end()));
  }
  return all;  // panels arrive sorted by country, points by year
}

std::string render_derived_csv(const std::vector<DerivedPoint>& points) {
  std::string out =
      "country,year,g,c_star,delta_g,delta_c_star,theta_c,passes_screen\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const DerivedPoint& p : points) {
    out += p.country_code;
    out += ',';
    out += std::to_string(p.year);
    out += ',';
    out += opt(p.growth);
    out += ',';
    out += format_double(p.c_star);
    out += ',';
    out += opt(p.delta_growth);
    out += ',';
    out += opt(p.delta_c_star);
    out += ',';
    out += opt(p.theta_c);
    out += ',';
    out += p.passes_screen ? "true" : "false";
    out += '\n';
  }
  return out;
}

ReportResult compute_report(const std::vector<CountryPanel>& panels,
                            const RunConfig& config) {
  const ScreenConfig delta_screen{ScreenVariable::DeltaGrowthRate,
                                  config.screen_threshold};
  std::vector<DerivedPoint> points = derive_all(panels, delta_screen);

  ReportResult result;

  RegressionSpec level_spec;
  level_spec.response = ResponseKind::NegCStar;
  level_spec.regressor = RegressorKind::GrowthRate;
  level_spec.screen = {ScreenVariable::GrowthRate, config.screen_threshold};
  level_spec.weights = config.weights;
  try {
    result.level = fit_panel_regression(level_spec, points);
  } catch (const EstimationError& err) {
    throw EstimationError("level regression (-c* on g): " +
                          std::string(err.what()));
  }

  RegressionSpec delta_spec;
  delta_spec.response = ResponseKind::NegDeltaCStar;
  delta_spec.regressor = RegressorKind::DeltaGrowthRate;
  delta_spec.screen = delta_screen;
  delta_spec.weights = config.weights;
  try {
    result.delta = fit_panel_regression(delta_spec, points);
  } catch (const EstimationError& err) {
    throw EstimationError("delta regression (-dc* on dg): " +
                          std::string(err.what()));
  }

  // Aggregates are GDP-weighted unless weighting is switched off entirely.
  std::vector<DerivedPoint> weighted = points;
  if (config.weights == WeightKind::None)
    for (DerivedPoint& p : weighted) p.gdp = 1.0;
  result.pooled_theta = pooled_weighted_theta(weighted);
  for (const DerivedPoint& p : weighted)
    if (p.passes_screen && p.theta_c) ++result.pooled_n_obs;
  result.yearly = yearly_weighted_theta(weighted);

  std::map<std::string, std::vector<DerivedPoint>> by_country;
  for (const DerivedPoint& p : points) by_country[p.country_code].push_back(p);
  for (const auto& [code, country_points] : by_country)
    if (auto summary = country_theta_summary(country_points))
      result.summaries.push_back(*summary);
  std::sort(result.summaries.begin(), result.summaries.end(),
            [](const CountrySummary& a, const CountrySummary& b) {
              return country_display_name(a.country_code) <
                     country_display_name(b.country_code);
            });
  return result;
}

std::string render_table1(const RegressionResult& level,
                          const RegressionResult& delta, double threshold,
                          WeightKind weights) {
  const std::string thr = format_double(threshold);
  const std::size_t label_w = 22, col_w = 16;
  auto row = [&](const std::string& label, const std::string& a,
                 const std::string& b) {
    return pad_right(label, label_w) + pad_left(a, col_w) +
           pad_left(b, col_w) + "\n";
  };
  auto num = [](double v) { return format_fixed(v, 3); };

  std::string out = "Regressions, all countries and years, ";
  out += weights == WeightKind::Gdp ? "GDP-weighted" : "unweighted";
  out += ".\n\n";
  out += row("", "-c* on g(K)", "-dc* on dg(K)");
  out += row("Regression", num(level.coefficient), num(delta.coefficient));
  out += row("Std. error", num(level.se_cluster_country),
             num(delta.se_cluster_country));
  out += row("Observations", std::to_string(level.n_obs),
             std::to_string(delta.n_obs));
  out += row("R2", num(level.r2), num(delta.r2));
  out += row("Within R2", num(level.r2_within), num(delta.r2_within));
  out += row("Screen", "|g(K)| >= " + thr, "|dg(K)| >= " + thr);
  out += row("Year fixed effects", "Yes", "Yes");
  out += row("Country fixed effects", "Yes", "Yes");
  return out;
}

std::string render_table2(const std::vector<CountrySummary>& summaries,
                          double threshold) {
  std::string out = "theta_c by country. Screen: |dg(K)| >= " +
                    format_double(threshold) + ".\n\n";
  std::size_t name_w = utf8_width("Country");
  for (const CountrySummary& s : summaries)
    name_w = std::max(name_w, utf8_width(country_display_name(s.country_code)));

  auto line = [&](const std::string& name, const std::string& theta,
                  const std::string& periods) {
    std::string padded = name;
    padded.append(name_w - utf8_width(name) + 2, ' ');
    return padded + pad_left(theta, 8) + "  " + periods + "\n";
  };
  out += line("Country", "theta_c", "Periods");
  for (const CountrySummary& s : summaries)
    out += line(country_display_name(s.country_code),
                format_fixed(s.theta_mean, 2), s.period_string);
  out += "\nNumber of periods is shown in ().\n";
  return out;
}

std::string render_figure1_csv(const std::vector<YearlyTheta>& series) {
  std::string out = "year,weighted_theta,n_countries\n";
  for (const YearlyTheta& point : series) {
    out += std::to_string(point.year);
    out += ',';
    out += format_double(point.weighted_theta);
    out += ',';
    out += std::to_string(point.n_countries);
    out += '\n';
  }
  return out;
}

std::string render_figure1_svg(const std::vector<YearlyTheta>& series) {
  const double width = 800, height = 400;
  const double ml = 60, mr = 20, mt = 20, mb = 40;
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
      "height=\"400\" viewBox=\"0 0 800 400\">\n";
  if (series.empty()) {
    out += "  <text x=\"400\" y=\"200\" text-anchor=\"middle\">no screened "
           "observations</text>\n</svg>\n";
    return out;
  }

  double xmin = series.front().year, xmax = series.back().year;
  if (xmax <= xmin) { xmin -= 1; xmax += 1; }
  double ymin = 0.0, ymax = 1.0;  // always show the 0 and 1 reference levels
  for (const YearlyTheta& p : series) {
    ymin = std::min(ymin, p.weighted_theta);
    ymax = std::max(ymax, p.weighted_theta);
  }
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double year) {
    return ml + (year - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto sy = [&](double v) {
    return mt + (ymax - v) / (ymax - ymin) * (height - mt - mb);
  };
  auto fx = [](double v) { return format_fixed(v, 2); };

  out += "  <rect x=\"" + fx(ml) + "\" y=\"" + fx(mt) + "\" width=\"" +
         fx(width - ml - mr) + "\" height=\"" + fx(height - mt - mb) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double ref : {0.0, 1.0}) {
    out += "  <line x1=\"" + fx(ml) + "\" y1=\"" + fx(sy(ref)) + "\" x2=\"" +
           fx(width - mr) + "\" y2=\"" + fx(sy(ref)) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    out += "  <text x=\"" + fx(ml - 6) + "\" y=\"" + fx(sy(ref) + 4) +
           "\" text-anchor=\"end\" font-size=\"12\">" + fx(ref) + "</text>\n";
  }
  std::string polyline;
  for (const YearlyTheta& p : series) {
    if (!polyline.empty()) polyline += ' ';
    polyline += fx(sx(p.year)) + "," + fx(sy(p.weighted_theta));
  }
  out += "  <polyline points=\"" + polyline +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  for (const YearlyTheta& p : series)
    out += "  <circle cx=\"" + fx(sx(p.year)) + "\" cy=\"" +
           fx(sy(p.weighted_theta)) + "\" r=\"2.5\" fill=\"black\"/>\n";
  out += "  <text x=\"" + fx(ml) + "\" y=\"" + fx(height - 10) +
         "\" font-size=\"12\">" + std::to_string(series.front().year) +
         "</text>\n";
  out += "  <text x=\"" + fx(width - mr) + "\" y=\"" + fx(height - 10) +
         "\" text-anchor=\"end\" font-size=\"12\">" +
         std::to_string(series.back().year) + "</text>\n";
  out += "  <text x=\"" + fx(width / 2) + "\" y=\"" + fx(height - 10) +
         "\" text-anchor=\"middle\" font-size=\"12\">GDP-weighted theta_c by "
         "year</text>\n";
  out += "</svg>\n";
  return out;
}

void cmd_derive(const RunConfig& config) {
  std::vector<CountryPanel> panels = load_panels(config);
  const ScreenConfig screen{config.screen_variable, config.screen_threshold};
  std::vector<DerivedPoint> points = derive_all(panels, screen);
  fs::create_directories(config.out_dir);
  write_text_file(fs::path(config.out_dir) / "derived.csv",
                  render_derived_csv(points));
}

void cmd_report(const RunConfig& config) {
  std::vector<CountryPanel> panels = load_panels(config);
  ReportResult result = compute_report(panels, config);
  fs::create_directories(config.out_dir);
  const fs::path out(config.out_dir);

  write_text_file(out / "table1.txt",
                  render_table1(result.level, result.delta,
                                config.screen_threshold, config.weights));
  write_text_file(out / "table2.txt",
                  render_table2(result.summaries, config.screen_threshold));
  write_text_file(out / "figure1.csv", render_figure1_csv(result.yearly));
  write_text_file(out / "figure1.svg", render_figure1_svg(result.yearly));
  write_text_file(out / "regression_level.kv",
                  regression_result_kv(result.level));
  write_text_file(out / "regression_delta.kv",
                  regression_result_kv(result.delta));

  std::string theta_kv;
  theta_kv += "pooled_weighted_theta " +
              (result.pooled_theta ? format_double(*result.pooled_theta)
                                   : std::string("none")) +
              "\n";
  theta_kv += "n_obs " + std::to_string(result.pooled_n_obs) + "\n";
  theta_kv += "n_countries " + std::to_string(result.summaries.size()) + "\n";
  write_text_file(out / "theta.kv", theta_kv);

  std::string country_csv =
      "country,theta_mean,n_periods,first_year,last_year\n";
  for (const CountrySummary& s : result.summaries) {
    country_csv += s.country_code;
    country_csv += ',';
    country_csv += format_double(s.theta_mean);
    country_csv += ',';
    country_csv += std::to_string(s.n_periods);
    country_csv += ',';
    country_csv += std::to_string(s.first_year);
    country_csv += ',';
    country_csv += std::to_string(s.last_year);
    country_csv += '\n';
  }
  write_text_file(out / "country_theta.csv", country_csv);

  // Run manifest: the only output that may carry a timestamp.
  std::string manifest;
  manifest += "thetac_version " + std::string(kVersion) + "\n";
  manifest += "generated_utc " + utc_timestamp() + "\n";
  manifest += "screen_threshold " + format_double(config.screen_threshold) + "\n";
  manifest += std::string("weights ") +
              (config.weights == WeightKind::Gdp ? "gdp" : "none") + "\n";
  if (config.year_min || config.year_max) {
    manifest += "years " +
                (config.year_min ? std::to_string(*config.year_min)
                                 : std::string("*")) +
                ".." +
                (config.year_max ? std::to_string(*config.year_max)
                                 : std::string("*")) +
                "\n";
  }
  for (const std::string& input : config.inputs)
    manifest += "input " + input + " sha256=" + sha256_hex_of_file(input) + "\n";
  write_text_file(out / "manifest.txt", manifest);
}

}  // namespace thetac
