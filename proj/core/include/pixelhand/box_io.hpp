#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pixelhand/geometry.hpp"

namespace pixelhand {

// Box list text format, one box per line:
//   x0 y0 x1 y1 x2 y2 x3 y3 score
// Lines with four fields are read as axis-aligned `x y w h` annotations with
// angle 0 and score 1. Blank lines and lines starting with '#' are skipped.

/// Throws ParseError on malformed lines and DegenerateGeometryError /
/// ConfigurationError on boxes that are not proper rectangles.
std::vector<RotatedBox> parse_boxes(std::istream& in);
void write_boxes(std::ostream& out, const std::vector<RotatedBox>& boxes);

std::string format_box(const RotatedBox& box);

std::vector<RotatedBox> load_boxes(const std::filesystem::path& path);
void save_boxes(const std::filesystem::path& path, const std::vector<RotatedBox>& boxes);

}  // namespace pixelhand
