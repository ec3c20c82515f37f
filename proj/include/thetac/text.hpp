#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thetac {

// Shortest representation that round-trips the exact double value.
std::string format_double(double value);

// Fixed-decimal formatting with ties resolved half-to-even, e.g.
// format_fixed(-0.0005, 2) == "-0.00". Used for table rendering only;
// machine-readable files keep full precision via format_double.
std::string format_fixed(double value, int decimals);

// Locale-independent numeric parsing. Whole string must be consumed.
std::optional<double> parse_double(std::string_view text);
std::optional<int> parse_int(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char delimiter);

// Two-digit zero-padded calendar year: 1997 -> "97", 2000 -> "00".
std::string two_digit_year(int year);

}  // namespace thetac
