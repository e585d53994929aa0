#include "pixelhand/mot_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "pixelhand/error.hpp"
#include "pixelhand/text_format.hpp"

namespace pixelhand {

std::string format_mot(const MotRecord& r) {
  return std::to_string(r.frame) + ',' + std::to_string(r.id) + ',' + format_double(r.box.x) + ',' +
         format_double(r.box.y) + ',' + format_double(r.box.w) + ',' + format_double(r.box.h) + ',' +
         format_double(r.score);
}

std::vector<MotRecord> parse_mot(std::istream& in) {
  std::vector<MotRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_on(body, ',');
    try {
      if (fields.size() != 6 && fields.size() != 7) {
        throw ParseError("expected 7 comma-separated fields, got " + std::to_string(fields.size()));
      }
      MotRecord r;
      r.frame = static_cast<long>(parse_integer(fields[0]));
      r.id = static_cast<long>(parse_integer(fields[1]));
      r.box = {parse_double(fields[2]), parse_double(fields[3]), parse_double(fields[4]),
               parse_double(fields[5])};
      if (fields.size() == 7) r.score = parse_double(fields[6]);
      if (r.frame < 1) throw ParseError("frame numbers start at 1");
      if (r.box.w < 0.0 || r.box.h < 0.0) throw ParseError("negative box size");
      records.push_back(r);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_mot(std::ostream& out, const std::vector<MotRecord>& records) {
  for (const auto& r : records) out << format_mot(r) << '\n';
}

std::vector<MotRecord> load_mot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_mot(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_mot(const std::filesystem::path& path, const std::vector<MotRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_mot(out, records);
}

}  // namespace pixelhand
