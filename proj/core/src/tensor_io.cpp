#include "pixelhand/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pixelhand/error.hpp"

namespace pixelhand {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'W', 'T', '1'};
constexpr std::uint32_t kMaxRank = 8;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  if (!in.read(bytes.data(), sizeof(T))) throw ParseError("tensor record truncated");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_array(std::ostream& out, const RawArray& array) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(array.dims.size()));
  for (std::uint32_t d : array.dims) put_le<std::uint32_t>(out, d);
  for (double v : array.data) put_le<double>(out, v);
}

bool has_record(std::istream& in) {
  return in.peek() != std::char_traits<char>::eof();
}

RawArray read_array(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("bad tensor magic, expected PWT1");
  }
  const auto rank = get_le<std::uint32_t>(in);
  if (rank == 0 || rank > kMaxRank) {
    throw ParseError("unsupported tensor rank " + std::to_string(rank));
  }
  RawArray array;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const auto d = get_le<std::uint32_t>(in);
    array.dims.push_back(d);
    count *= d;
    if (count > (std::uint64_t{1} << 32)) throw ParseError("tensor record too large");
  }
  array.data.resize(count);
  for (auto& v : array.data) v = get_le<double>(in);
  return array;
}

RawArray to_array(const Tensor& tensor) {
  RawArray array;
  array.dims = {static_cast<std::uint32_t>(tensor.channels()),
                static_cast<std::uint32_t>(tensor.height()),
                static_cast<std::uint32_t>(tensor.width())};
  array.data.assign(tensor.data().begin(), tensor.data().end());
  return array;
}

Tensor to_tensor(const RawArray& array) {
  if (array.dims.size() == 2) {
    if (array.dims[0] == 0 || array.dims[1] == 0) throw ParseError("zero-sized spatial dimension");
    return Tensor(1, array.dims[0], array.dims[1], array.data);
  }
  if (array.dims.size() != 3) {
    throw ParseError("expected rank-3 tensor, got rank " + std::to_string(array.dims.size()));
  }
  if (array.dims[1] == 0 || array.dims[2] == 0) throw ParseError("zero-sized spatial dimension");
  return Tensor(array.dims[0], array.dims[1], array.dims[2], array.data);
}

void save_tensors(const std::filesystem::path& path, const std::vector<Tensor>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& t : tensors) write_array(out, to_array(t));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Tensor> load_tensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Tensor> tensors;
  while (has_record(in)) tensors.push_back(to_tensor(read_array(in)));
  return tensors;
}

void save_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  save_tensors(path, {tensor});
}

Tensor load_tensor(const std::filesystem::path& path) {
  auto tensors = load_tensors(path);
  if (tensors.size() != 1) {
    throw ParseError(path.string() + ": expected one tensor record, found " +
                     std::to_string(tensors.size()));
  }
  return std::move(tensors.front());
}

}  // namespace pixelhand
