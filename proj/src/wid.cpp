#include "thetac/wid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>

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

struct HeaderLayout {
  char delimiter = ';';
  int country = -1;
  int variable = -1;
  int percentile = -1;
  int year = -1;
  int value = -1;
  std::size_t min_fields = 0;
};

HeaderLayout parse_header(const std::string& line,
                          const std::string& source_name) {
  auto semicolons = std::count(line.begin(), line.end(), ';');
  auto commas = std::count(line.begin(), line.end(), ',');
  HeaderLayout layout;
  layout.delimiter = semicolons >= commas ? ';' : ',';

  auto fields = split(line, layout.delimiter);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    std::string name = lower(trim(fields[i]));
    int idx = static_cast<int>(i);
    if (name == "country") layout.country = idx;
    else if (name == "variable") layout.variable = idx;
    else if (name == "percentile") layout.percentile = idx;
    else if (name == "year") layout.year = idx;
    else if (name == "value") layout.value = idx;
  }
  for (auto [col, name] : {std::pair{layout.country, "country"},
                           {layout.variable, "variable"},
                           {layout.percentile, "percentile"},
                           {layout.year, "year"},
                           {layout.value, "value"}}) {
    if (col < 0)
      throw InputError(source_name + ": missing required column '" +
                       std::string(name) + "'");
    layout.min_fields = std::max(layout.min_fields,
                                 static_cast<std::size_t>(col) + 1);
  }
  return layout;
}

}  // namespace

WidParseResult parse_wid_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw InputError(source_name + ": empty input");
  HeaderLayout layout = parse_header(line, source_name);

  WidParseResult result;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(line, layout.delimiter);
    if (fields.size() < layout.min_fields) {
      ++result.skipped_rows;
      continue;
    }
    auto year = parse_int(fields[layout.year]);
    auto value = parse_double(fields[layout.value]);
    if (!year || *year < 1800 || *year > 2100 || !value ||
        !std::isfinite(*value)) {
      ++result.skipped_rows;
      continue;
    }
    RawObservation obs;
    obs.country_code = std::string(trim(fields[layout.country]));
    obs.variable_code = std::string(trim(fields[layout.variable]));
    obs.percentile = std::string(trim(fields[layout.percentile]));
    obs.year = *year;
    obs.value = *value;
    result.observations.push_back(std::move(obs));
  }
  return result;
}

WidParseResult parse_wid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open WID file: " + path);
  return parse_wid_csv(in, path);
}

std::vector<CountryPanel> assemble_dataset(
    const std::vector<RawObservation>& observations, const VariableMap& map) {
  enum Slot { kCapital, kGov, kHousehold, kGdp, kSlotCount };
  const std::string* prefixes[kSlotCount] = {
      &map.capital_prefix, &map.gov_consumption_prefix,
      &map.household_consumption_prefix, &map.gdp_prefix};
  for (int a = 0; a < kSlotCount; ++a)
    for (int b = a + 1; b < kSlotCount; ++b)
      if (*prefixes[a] == *prefixes[b])
        throw InputError("variable map requires four distinct codes; '" +
                         *prefixes[a] + "' repeats");

  struct Cell {
    std::optional<double> value[kSlotCount];
    std::string code[kSlotCount];
  };
  // map keys keep output deterministic regardless of input row order
  std::map<std::string, std::map<int, Cell>> by_country;

  for (const RawObservation& obs : observations) {
    if (obs.percentile != map.percentile_filter) continue;
    for (int slot = 0; slot < kSlotCount; ++slot) {
      if (!obs.variable_code.starts_with(*prefixes[slot])) continue;
      Cell& cell = by_country[obs.country_code][obs.year];
      if (cell.value[slot] && *cell.value[slot] != obs.value)
        throw InputError("ambiguous values for prefix '" + *prefixes[slot] +
                         "' in " + obs.country_code + " year " +
                         std::to_string(obs.year) + ": codes " +
                         cell.code[slot] + " and " + obs.variable_code);
      cell.value[slot] = obs.value;
      cell.code[slot] = obs.variable_code;
    }
  }

  std::vector<CountryPanel> panels;
  for (const auto& [country, years] : by_country) {
    std::vector<RawPanelRow> rows;
    for (const auto& [year, cell] : years) {
      RawPanelRow row;
      row.year = year;
      row.capital = cell.value[kCapital];
      // consumption needs both parts; otherwise the year is dropped
      if (cell.value[kGov] && cell.value[kHousehold])
        row.consumption = *cell.value[kGov] + *cell.value[kHousehold];
      row.gdp = cell.value[kGdp];
      rows.push_back(row);
    }
    CountryPanel panel = build_country_panel(country, std::move(rows));
    if (!panel.rows.empty()) panels.push_back(std::move(panel));
  }
  return panels;
}

}  // namespace thetac
