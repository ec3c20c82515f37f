#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace thetac {

// Display name for an ISO 3166-1 alpha-2 code; unknown codes come back
// unchanged.
std::string country_display_name(std::string_view iso_code);

// Every code in the bundled table, sorted; doubles as the "all" country list
// for the fetcher.
std::vector<std::string> all_country_codes();

}  // namespace thetac
