#include "pixelhand/box_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "pixelhand/error.hpp"
#include "pixelhand/text_format.hpp"

namespace pixelhand {

std::string format_box(const RotatedBox& box) {
  std::string line;
  for (const auto& v : box.vertices) {
    line += format_double(v.x);
    line += ' ';
    line += format_double(v.y);
    line += ' ';
  }
  line += format_double(box.score);
  return line;
}

std::vector<RotatedBox> parse_boxes(std::istream& in) {
  std::vector<RotatedBox> boxes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_whitespace(body);
    try {
      RotatedBox box;
      if (fields.size() == 9) {
        for (std::size_t i = 0; i < 4; ++i) {
          box.vertices[i] = {parse_double(fields[2 * i]), parse_double(fields[2 * i + 1])};
        }
        box.score = parse_double(fields[8]);
      } else if (fields.size() == 4) {
        box = make_box(AxisBox{parse_double(fields[0]), parse_double(fields[1]),
                               parse_double(fields[2]), parse_double(fields[3])});
      } else {
        throw ParseError("expected 9 or 4 fields, got " + std::to_string(fields.size()));
      }
      if (!(box.score >= 0.0 && box.score <= 1.0)) {
        throw ParseError("score must lie in [0, 1]");
      }
      canonical_box(box);
      boxes.push_back(box);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DegenerateGeometryError& e) {
      throw DegenerateGeometryError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigurationError& e) {
      throw ConfigurationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return boxes;
}

void write_boxes(std::ostream& out, const std::vector<RotatedBox>& boxes) {
  for (const auto& box : boxes) out << format_box(box) << '\n';
}

std::vector<RotatedBox> load_boxes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_boxes(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_boxes(const std::filesystem::path& path, const std::vector<RotatedBox>& boxes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_boxes(out, boxes);
}

}  // namespace pixelhand
