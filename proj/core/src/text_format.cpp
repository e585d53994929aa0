#include "pixelhand/text_format.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "pixelhand/error.hpp"

namespace pixelhand {

std::string format_double(double value) {
  if (value == 0.0) value = 0.0;  // fold -0 so outputs stay canonical
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw ParseError("cannot format number");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view field) {
  field = trim(field);
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty() || !std::isfinite(value)) {
    throw ParseError("not a finite number: '" + std::string(field) + "'");
  }
  return value;
}

long long parse_integer(std::string_view field) {
  field = trim(field);
  long long value = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw ParseError("not an integer: '" + std::string(field) + "'");
  }
  return value;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto stop = line.find_first_of(" \t\r", start);
    if (stop == std::string_view::npos) stop = line.size();
    fields.push_back(line.substr(start, stop - start));
    pos = stop;
  }
  return fields;
}

std::vector<std::string_view> split_on(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto stop = line.find(delimiter, start);
    if (stop == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, stop - start));
    start = stop + 1;
  }
  return fields;
}

}  // namespace pixelhand
