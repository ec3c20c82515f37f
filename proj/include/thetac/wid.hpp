#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "thetac/panel.hpp"

namespace thetac {

// One row of a WID bulk export.
struct RawObservation {
  std::string country_code;
  std::string variable_code;
  std::string percentile;
  int year = 0;
  double value = 0.0;
};

// Which WID variables feed the panel. Matching is by prefix because bulk
// files suffix the short codes with age/population markers (e.g. mnweal999i).
struct VariableMap {
  std::string capital_prefix = "mnweal";
  std::string gov_consumption_prefix = "mcongo";
  std::string household_consumption_prefix = "mconhn";
  std::string gdp_prefix = "mgdpro";
  std::string percentile_filter = "p0p100";
};

struct WidParseResult {
  std::vector<RawObservation> observations;
  std::size_t skipped_rows = 0;  // unparsable year/value or short rows
};

// Delimiter is auto-detected between ';' and ',' from the header line.
// Required columns: country, variable, percentile, year, value (any order,
// extra columns ignored). A missing required column is fatal.
WidParseResult parse_wid_csv(std::istream& in, const std::string& source_name);
WidParseResult parse_wid_file(const std::string& path);

// Combines the four mapped variables into country panels:
// K from capital, C = gov + household consumption (year kept only when both
// parts exist), GDP from the gdp variable. Two distinct values matching one
// slot for the same country-year is a fatal ambiguity.
std::vector<CountryPanel> assemble_dataset(
    const std::vector<RawObservation>& observations, const VariableMap& map);

}  // namespace thetac
