#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pixelhand {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Parses a whole field as a double; throws ParseError otherwise.
double parse_double(std::string_view field);
long long parse_integer(std::string_view field);

/// Splits on runs of spaces/tabs, dropping empty fields.
std::vector<std::string_view> split_whitespace(std::string_view line);
/// Splits on a single delimiter, keeping empty fields.
std::vector<std::string_view> split_on(std::string_view line, char delimiter);

std::string_view trim(std::string_view text);

}  // namespace pixelhand
