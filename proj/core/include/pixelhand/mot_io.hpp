#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pixelhand/tracking.hpp"

namespace pixelhand {

// MOT text format, one record per line:
//   frame,id,bb_left,bb_top,bb_width,bb_height,score
// A line with six fields has score 1. Blank lines and '#' lines are skipped.

std::vector<MotRecord> parse_mot(std::istream& in);
void write_mot(std::ostream& out, const std::vector<MotRecord>& records);
std::string format_mot(const MotRecord& record);

std::vector<MotRecord> load_mot(const std::filesystem::path& path);
void save_mot(const std::filesystem::path& path, const std::vector<MotRecord>& records);

}  // namespace pixelhand
