#include "thetac/text.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>

namespace thetac {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return format_double(value);
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) scale *= 10.0;
  // nearbyint under the default rounding mode resolves ties to even.
  double scaled = std::nearbyint(value * scale);
  bool negative = std::signbit(value) && !std::isnan(value);
  auto magnitude = static_cast<std::uint64_t>(std::fabs(scaled));

  std::string digits = std::to_string(magnitude);
  if (static_cast<int>(digits.size()) <= decimals)
    digits.insert(0, decimals + 1 - digits.size(), '0');

  std::string out;
  if (negative) out += '-';
  out.append(digits, 0, digits.size() - decimals);
  if (decimals > 0) {
    out += '.';
    out.append(digits, digits.size() - decimals, decimals);
  }
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    return std::nullopt;
  return value;
}

std::optional<int> parse_int(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  int value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    return std::nullopt;
  return value;
}

std::string_view trim(std::string_view text) {
  const char* ws = " \t\r\n";
  auto begin = text.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(ws);
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string_view> split(std::string_view text, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(text.substr(start));
      return fields;
    }
    fields.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string two_digit_year(int year) {
  int yy = ((year % 100) + 100) % 100;
  std::string out = std::to_string(yy);
  if (out.size() < 2) out.insert(0, "0");
  return out;
}

}  // namespace thetac
