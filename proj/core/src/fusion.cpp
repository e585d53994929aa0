#include "pixelhand/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pixelhand/error.hpp"
#include "pixelhand/random.hpp"

namespace pixelhand {

namespace {

constexpr double kSaturatingBias = -1000.0;

std::string level_str(std::size_t s) { return std::to_string(s); }

void check_kernel(const ConvKernel& k, std::size_t out, std::size_t in, std::size_t size,
                  const std::string& name) {
  if (k.out_channels() != out || k.in_channels() != in || k.kernel_size() != size) {
    throw ConfigurationError(name + ": expected (" + std::to_string(out) + "," + std::to_string(in) +
                             "," + std::to_string(size) + "x" + std::to_string(size) + "), got (" +
                             std::to_string(k.out_channels()) + "," + std::to_string(k.in_channels()) +
                             "," + std::to_string(k.kernel_size()) + "x" +
                             std::to_string(k.kernel_size()) + ")");
  }
}

template <typename Fn>
FusionWeights shaped_weights(const FusionConfig& config, Fn&& make) {
  config.validate();
  FusionWeights w;
  for (std::size_t s = 0; s < kFusionBlocks; ++s) {
    const std::size_t in_s = config.input_channels[s];
    const std::size_t coarse = config.output_channels(s + 1);
    const std::size_t cs = config.fused_channels[s];
    const std::size_t fuse_in =
        config.block.order == ConvOrder::as_printed ? in_s + coarse : cs;
    w.blocks[s].mask = make(in_s, coarse, 1);
    w.blocks[s].reduce = make(cs, in_s + coarse, 1);
    w.blocks[s].fuse = make(cs, fuse_in, 3);
  }
  for (std::size_t s = 0; s < kPyramidLevels; ++s) {
    const std::size_t fused = config.output_channels(s);
    w.heads[s].merge = make(config.head_channels, fused, 3);
    w.heads[s].score = make(1, config.head_channels, 1);
    w.heads[s].rotation = make(1, config.head_channels, 1);
    w.heads[s].distance = make(4, config.head_channels, 3);
  }
  return w;
}

}  // namespace

std::size_t FusionConfig::output_channels(std::size_t level) const {
  return level + 1 < kPyramidLevels ? fused_channels.at(level) : input_channels.at(level);
}

void FusionConfig::validate() const {
  for (std::size_t c : input_channels) {
    if (c == 0) throw ConfigurationError("pyramid input channels must be positive");
  }
  for (std::size_t c : fused_channels) {
    if (c == 0) throw ConfigurationError("fused channels c_s must be positive");
  }
  if (head_channels == 0) throw ConfigurationError("head channels must be positive");
  if (!(distance_scale > 0.0)) throw ConfigurationError("distance scale must be positive");
}

FusionWeights zero_weights(const FusionConfig& config) {
  return shaped_weights(config, [](std::size_t out, std::size_t in, std::size_t k) {
    return ConvKernel(out, in, k);
  });
}

FusionWeights random_weights(const FusionConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return shaped_weights(config, [&rng](std::size_t out, std::size_t in, std::size_t k) {
    ConvKernel kernel(out, in, k);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in * k * k));
    for (double& w : kernel.weights()) w = rng.uniform(-bound, bound);
    for (double& b : kernel.bias()) b = rng.uniform(-bound, bound);
    return kernel;
  });
}

void neutralize_masks(FusionWeights& weights) {
  for (auto& block : weights.blocks) {
    for (double& w : block.mask.weights()) w = 0.0;
    for (double& b : block.mask.bias()) b = kSaturatingBias;
  }
}

void check_weights(const FusionConfig& config, const FusionWeights& weights) {
  config.validate();
  for (std::size_t s = 0; s < kFusionBlocks; ++s) {
    const std::size_t in_s = config.input_channels[s];
    const std::size_t coarse = config.output_channels(s + 1);
    const std::size_t cs = config.fused_channels[s];
    const std::size_t fuse_in = config.block.order == ConvOrder::as_printed ? in_s + coarse : cs;
    const std::string p = "block" + level_str(s) + ".";
    check_kernel(weights.blocks[s].mask, in_s, coarse, 1, p + "mask");
    check_kernel(weights.blocks[s].reduce, cs, in_s + coarse, 1, p + "reduce");
    check_kernel(weights.blocks[s].fuse, cs, fuse_in, 3, p + "fuse");
  }
  for (std::size_t s = 0; s < kPyramidLevels; ++s) {
    const std::string p = "head" + level_str(s) + ".";
    check_kernel(weights.heads[s].merge, config.head_channels, config.output_channels(s), 3,
                 p + "merge");
    check_kernel(weights.heads[s].score, 1, config.head_channels, 1, p + "score");
    check_kernel(weights.heads[s].rotation, 1, config.head_channels, 1, p + "rotation");
    check_kernel(weights.heads[s].distance, 4, config.head_channels, 3, p + "distance");
  }
}

FusionConfig infer_config(const FusionWeights& weights, ConvOrder order) {
  FusionConfig config;
  config.block.order = order;
  config.head_channels = weights.heads[0].merge.out_channels();
  config.input_channels[kPyramidLevels - 1] = weights.heads[kPyramidLevels - 1].merge.in_channels();
  for (std::size_t s = 0; s < kFusionBlocks; ++s) {
    config.input_channels[s] = weights.blocks[s].mask.out_channels();
    config.fused_channels[s] = weights.blocks[s].reduce.out_channels();
  }
  check_weights(config, weights);
  return config;
}

Tensor highlight_mask(const Tensor& upsampled, const ConvKernel& mask_kernel,
                      MaskActivation activation) {
  Tensor response = conv2d(upsampled, mask_kernel);
  if (activation == MaskActivation::sigmoid) response = sigmoid(response);
  return elementwise(1.0, response, ElementwiseOp::sub);
}

BlockOutput fusion_block(const Tensor& features, const Tensor& coarser, const BlockWeights& weights,
                         const BlockOptions& options) {
  if (2 * coarser.height() != features.height() || 2 * coarser.width() != features.width()) {
    throw ConfigurationError("fusion block: coarser map must be exactly half the size of the features");
  }
  const Tensor up = upsample2x(coarser, options.upsample);
  BlockOutput out;
  Tensor kept = features;
  if (options.kind == BlockKind::hff) {
    out.mask = highlight_mask(up, weights.mask, options.mask);
    kept = elementwise(features, out.mask, ElementwiseOp::mul);
  }
  const Tensor joined = concat_channels(kept, up);
  if (options.order == ConvOrder::as_printed) {
    out.fused = conv2d(joined, weights.fuse);
  } else {
    out.fused = conv2d(conv2d(joined, weights.reduce), weights.fuse);
  }
  return out;
}

Tensor hff_block(const Tensor& features, const Tensor& coarser, const BlockWeights& weights,
                 BlockOptions options) {
  options.kind = BlockKind::hff;
  return fusion_block(features, coarser, weights, options).fused;
}

Tensor bff_block(const Tensor& features, const Tensor& coarser, const BlockWeights& weights,
                 BlockOptions options) {
  options.kind = BlockKind::bff;
  return fusion_block(features, coarser, weights, options).fused;
}

CascadeOutput cascade(std::span<const Tensor> features, const FusionConfig& config,
                      const FusionWeights& weights) {
  if (features.size() != kPyramidLevels) {
    throw ConfigurationError("cascade needs exactly 4 pyramid levels, got " +
                             std::to_string(features.size()));
  }
  check_weights(config, weights);
  for (std::size_t s = 0; s < kPyramidLevels; ++s) {
    if (features[s].channels() != config.input_channels[s]) {
      throw ConfigurationError("pyramid level " + level_str(s) + " has " +
                               std::to_string(features[s].channels()) + " channels, config says " +
                               std::to_string(config.input_channels[s]));
    }
    if (s + 1 < kPyramidLevels && (features[s].height() != 2 * features[s + 1].height() ||
                                   features[s].width() != 2 * features[s + 1].width())) {
      throw ConfigurationError("pyramid level " + level_str(s) +
                               " must be twice the size of level " + level_str(s + 1));
    }
  }
  CascadeOutput out;
  out.fused[kPyramidLevels - 1] = features[kPyramidLevels - 1];
  for (std::size_t s = kFusionBlocks; s-- > 0;) {
    BlockOutput step = fusion_block(features[s], out.fused[s + 1], weights.blocks[s], config.block);
    out.fused[s] = std::move(step.fused);
    out.masks[s] = std::move(step.mask);
  }
  return out;
}

GeometryMaps head(const Tensor& fused, const HeadWeights& weights, std::size_t out_h,
                  std::size_t out_w, double distance_scale, UpsampleMode upsample) {
  if (out_h % fused.height() != 0 || out_w % fused.width() != 0 ||
      out_h / fused.height() != out_w / fused.width()) {
    throw ConfigurationError("head: output size must be the same integer multiple of the input size");
  }
  const std::size_t factor = out_h / fused.height();
  if ((factor & (factor - 1)) != 0) {
    throw ConfigurationError("head: upsampling factor must be a power of two");
  }
  Tensor merged = conv2d(fused, weights.merge);
  while (merged.height() < out_h) merged = upsample2x(merged, upsample);

  Tensor score = sigmoid(conv2d(merged, weights.score));
  Tensor rotation = sigmoid(conv2d(merged, weights.rotation));
  const double limit = std::nextafter(std::numbers::pi / 2.0, 0.0);
  for (double& v : rotation.data()) v = std::clamp((v - 0.5) * std::numbers::pi, -limit, limit);
  Tensor distance = softplus(conv2d(merged, weights.distance));
  if (distance_scale != 1.0) distance = elementwise(distance, distance_scale, ElementwiseOp::mul);
  return GeometryMaps(std::move(score), std::move(rotation), std::move(distance));
}

std::vector<GeometryMaps> forward(std::span<const Tensor> features, const FusionConfig& config,
                                  const FusionWeights& weights, std::size_t out_h,
                                  std::size_t out_w) {
  const CascadeOutput fused = cascade(features, config, weights);
  std::vector<GeometryMaps> maps;
  maps.reserve(kPyramidLevels);
  for (std::size_t s = 0; s < kPyramidLevels; ++s) {
    maps.push_back(head(fused.fused[s], weights.heads[s], out_h, out_w, config.distance_scale,
                        config.block.upsample));
  }
  return maps;
}

std::vector<Tensor> average_pool_pyramid(const Tensor& image) {
  if (image.height() % 32 != 0 || image.width() % 32 != 0) {
    throw ConfigurationError("pyramid input height and width must be multiples of 32");
  }
  std::vector<Tensor> levels;
  Tensor current = average_pool2x(average_pool2x(image));
  levels.push_back(current);
  for (std::size_t s = 1; s < kPyramidLevels; ++s) {
    current = average_pool2x(current);
    levels.push_back(current);
  }
  return levels;
}

}  // namespace pixelhand
