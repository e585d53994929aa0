#include "pixelhand/weights_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "pixelhand/error.hpp"
#include "pixelhand/tensor_io.hpp"
#include "pixelhand/text_format.hpp"

namespace pixelhand {

namespace {

constexpr std::string_view kManifestMagic = "PWW1";

std::string block_name(std::size_t s, const char* part) {
  return "block" + std::to_string(s) + "." + part;
}
std::string head_name(std::size_t s, const char* part) {
  return "head" + std::to_string(s) + "." + part;
}

const ConvKernel& require(const NamedKernels& kernels, const std::string& name) {
  const auto it = kernels.find(name);
  if (it == kernels.end()) throw ConfigurationError("weights file is missing kernel " + name);
  return it->second;
}

}  // namespace

void write_kernels(std::ostream& out, const NamedKernels& kernels) {
  out << kManifestMagic << ' ' << kernels.size() << '\n';
  for (const auto& [name, k] : kernels) {
    out << name << ' ' << k.out_channels() << ' ' << k.in_channels() << ' ' << k.kernel_size()
        << '\n';
  }
  for (const auto& [name, k] : kernels) {
    const auto ks = static_cast<std::uint32_t>(k.kernel_size());
    write_array(out, RawArray{{static_cast<std::uint32_t>(k.out_channels()),
                               static_cast<std::uint32_t>(k.in_channels()), ks, ks},
                              {k.weights().begin(), k.weights().end()}});
    write_array(out, RawArray{{static_cast<std::uint32_t>(k.out_channels())},
                              {k.bias().begin(), k.bias().end()}});
  }
}

NamedKernels read_kernels(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("weights file is empty");
  auto header = split_whitespace(line);
  if (header.size() != 2 || header[0] != kManifestMagic) {
    throw ParseError("bad weights manifest header, expected 'PWW1 <count>'");
  }
  const long long count = parse_integer(header[1]);
  if (count < 0 || count > 4096) throw ParseError("implausible kernel count in weights manifest");

  struct Entry {
    std::string name;
    std::uint32_t out, in, k;
  };
  std::vector<Entry> entries;
  for (long long i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ParseError("weights manifest truncated");
    const auto f = split_whitespace(line);
    if (f.size() != 4) throw ParseError("weights manifest line needs '<name> <out> <in> <k>'");
    const auto out_ch = parse_integer(f[1]);
    const auto in_ch = parse_integer(f[2]);
    const auto ks = parse_integer(f[3]);
    if (out_ch < 0 || in_ch < 0 || ks < 0) throw ParseError("negative kernel dimension");
    entries.push_back({std::string(f[0]), static_cast<std::uint32_t>(out_ch),
                       static_cast<std::uint32_t>(in_ch), static_cast<std::uint32_t>(ks)});
  }

  NamedKernels kernels;
  for (const auto& e : entries) {
    RawArray w = read_array(in);
    RawArray b = read_array(in);
    const std::vector<std::uint32_t> wdims{e.out, e.in, e.k, e.k};
    if (w.dims != wdims || b.dims != std::vector<std::uint32_t>{e.out}) {
      throw ConfigurationError("kernel " + e.name + " payload does not match its manifest shape");
    }
    if (!kernels.emplace(e.name, ConvKernel(e.out, e.in, e.k, std::move(w.data), std::move(b.data)))
             .second) {
      throw ParseError("duplicate kernel name " + e.name);
    }
  }
  return kernels;
}

NamedKernels to_named(const FusionWeights& weights) {
  NamedKernels named;
  for (std::size_t s = 0; s < kFusionBlocks; ++s) {
    named[block_name(s, "mask")] = weights.blocks[s].mask;
    named[block_name(s, "reduce")] = weights.blocks[s].reduce;
    named[block_name(s, "fuse")] = weights.blocks[s].fuse;
  }
  for (std::size_t s = 0; s < kPyramidLevels; ++s) {
    named[head_name(s, "merge")] = weights.heads[s].merge;
    named[head_name(s, "score")] = weights.heads[s].score;
    named[head_name(s, "rotation")] = weights.heads[s].rotation;
    named[head_name(s, "distance")] = weights.heads[s].distance;
  }
  return named;
}

FusionWeights from_named(const NamedKernels& kernels) {
  FusionWeights weights;
  for (std::size_t s = 0; s < kFusionBlocks; ++s) {
    weights.blocks[s].mask = require(kernels, block_name(s, "mask"));
    weights.blocks[s].reduce = require(kernels, block_name(s, "reduce"));
    weights.blocks[s].fuse = require(kernels, block_name(s, "fuse"));
  }
  for (std::size_t s = 0; s < kPyramidLevels; ++s) {
    weights.heads[s].merge = require(kernels, head_name(s, "merge"));
    weights.heads[s].score = require(kernels, head_name(s, "score"));
    weights.heads[s].rotation = require(kernels, head_name(s, "rotation"));
    weights.heads[s].distance = require(kernels, head_name(s, "distance"));
  }
  return weights;
}

void save_weights(const std::filesystem::path& path, const FusionWeights& weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_kernels(out, to_named(weights));
  if (!out) throw IoError("failed writing " + path.string());
}

FusionWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return from_named(read_kernels(in));
}

}  // namespace pixelhand
