#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "pixelhand/tensor.hpp"

namespace pixelhand {

// Binary record layout (all little-endian):
//   "PWT1"  u32 rank  u32 dims[rank]  f64 payload[product(dims)]
// A file may hold several records back to back.

struct RawArray {
  std::vector<std::uint32_t> dims;
  std::vector<double> data;

  friend bool operator==(const RawArray&, const RawArray&) = default;
};

void write_array(std::ostream& out, const RawArray& array);
/// Reads one record. Throws ParseError on a bad magic or short payload.
RawArray read_array(std::istream& in);
/// True when another record starts at the current position.
bool has_record(std::istream& in);

RawArray to_array(const Tensor& tensor);
/// Rank-3 arrays map to (C,H,W); rank-2 arrays to (1,H,W).
Tensor to_tensor(const RawArray& array);

void save_tensors(const std::filesystem::path& path, const std::vector<Tensor>& tensors);
std::vector<Tensor> load_tensors(const std::filesystem::path& path);

void save_tensor(const std::filesystem::path& path, const Tensor& tensor);
/// Loads a file that must contain exactly one tensor record.
Tensor load_tensor(const std::filesystem::path& path);

}  // namespace pixelhand
