#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "pixelhand/fusion.hpp"

namespace pixelhand {

// Weights file layout:
//   text manifest   "PWW1 <count>\n" then one "<name> <out> <in> <k>\n" per kernel
//   binary payload  for each manifest entry, in order: a rank-4 PWT1 record
//                   (out, in, k, k) with the weights, then a rank-1 record (out)
//                   with the bias.
// Kernel names: block<s>.{mask,reduce,fuse} for s = 0..2 and
// head<s>.{merge,score,rotation,distance} for s = 0..3.

using NamedKernels = std::map<std::string, ConvKernel>;

void write_kernels(std::ostream& out, const NamedKernels& kernels);
NamedKernels read_kernels(std::istream& in);

NamedKernels to_named(const FusionWeights& weights);
/// Throws ConfigurationError when a required kernel is missing.
FusionWeights from_named(const NamedKernels& kernels);

void save_weights(const std::filesystem::path& path, const FusionWeights& weights);
FusionWeights load_weights(const std::filesystem::path& path);

}  // namespace pixelhand
