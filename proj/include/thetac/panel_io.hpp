#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thetac/panel.hpp"

namespace thetac {

// Canonical panel interchange format: UTF-8 comma-separated text with header
// `country,year,K,C,GDP`, one row per country-year. Empty numeric fields mark
// missing values on read; the writer never emits them (panels are complete).

std::vector<CountryPanel> read_panels_csv(std::istream& in,
                                          const std::string& source_name);
std::vector<CountryPanel> read_panels_file(const std::string& path);

std::string render_panels_csv(const std::vector<CountryPanel>& panels);
void write_panels_file(const std::string& path,
                       const std::vector<CountryPanel>& panels);

// True when the header line looks like the canonical `country,year,K,C,GDP`.
bool is_canonical_panel_header(const std::string& header_line);

}  // namespace thetac
