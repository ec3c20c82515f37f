#include "thetac/panel_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "thetac/errors.hpp"
#include "thetac/text.hpp"

namespace thetac {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

bool is_canonical_panel_header(const std::string& header_line) {
  auto fields = split(trim(header_line), ',');
  if (fields.size() < 5) return false;
  return lower(trim(fields[0])) == "country" && lower(trim(fields[1])) == "year" &&
         lower(trim(fields[2])) == "k" && lower(trim(fields[3])) == "c" &&
         lower(trim(fields[4])) == "gdp";
}

std::vector<CountryPanel> read_panels_csv(std::istream& in,
                                          const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line))
    throw InputError(source_name + ": empty panel file");
  if (!is_canonical_panel_header(line))
    throw InputError(source_name + ": expected header country,year,K,C,GDP");

  std::map<std::string, std::vector<RawPanelRow>> rows_by_country;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() < 5)
      throw InputError(source_name + ":" + std::to_string(line_no) +
                       ": expected 5 fields");
    auto year = parse_int(fields[1]);
    if (!year)
      throw InputError(source_name + ":" + std::to_string(line_no) +
                       ": bad year '" + std::string(fields[1]) + "'");
    RawPanelRow row;
    row.year = *year;
    row.capital = parse_double(fields[2]);
    row.consumption = parse_double(fields[3]);
    row.gdp = parse_double(fields[4]);
    rows_by_country[std::string(trim(fields[0]))].push_back(row);
  }

  std::vector<CountryPanel> panels;
  panels.reserve(rows_by_country.size());
  for (auto& [code, rows] : rows_by_country)
    panels.push_back(build_country_panel(code, std::move(rows)));
  return panels;
}

std::vector<CountryPanel> read_panels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open panel file: " + path);
  return read_panels_csv(in, path);
}

std::string render_panels_csv(const std::vector<CountryPanel>& panels) {
  std::string out = "country,year,K,C,GDP\n";
  for (const CountryPanel& panel : panels) {
    for (const PanelRow& row : panel.rows) {
      out += panel.country_code;
      out += ',';
      out += std::to_string(row.year);
      out += ',';
      out += format_double(row.capital);
      out += ',';
      out += format_double(row.consumption);
      out += ',';
      out += format_double(row.gdp);
      out += '\n';
    }
  }
  return out;
}

void write_panels_file(const std::string& path,
                       const std::vector<CountryPanel>& panels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write panel file: " + path);
  out << render_panels_csv(panels);
}

}  // namespace thetac
