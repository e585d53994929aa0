#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pixelhand/geometry.hpp"
#include "pixelhand/tensor.hpp"

namespace pixelhand {

inline constexpr std::size_t kPyramidLevels = 4;
inline constexpr std::size_t kFusionBlocks = kPyramidLevels - 1;

enum class BlockKind { hff, bff };

/// How the mask convolution output becomes a mask: `sigmoid` gives
/// 1 - sigmoid(conv) in (0, 1); `raw` gives the unbounded 1 - conv.
enum class MaskActivation { sigmoid, raw };

/// `reduce_then_fuse` feeds the 1x1 reduction into the 3x3 fusion;
/// `as_printed` applies the 3x3 fusion to the concatenation directly and leaves
/// the 1x1 reduction unused.
enum class ConvOrder { reduce_then_fuse, as_printed };

struct BlockOptions {
  BlockKind kind = BlockKind::hff;
  MaskActivation mask = MaskActivation::sigmoid;
  ConvOrder order = ConvOrder::reduce_then_fuse;
  UpsampleMode upsample = UpsampleMode::bilinear;
};

/// Channel layout of the four-level pyramid, finest level first.
struct FusionConfig {
  std::array<std::size_t, kPyramidLevels> input_channels{};
  /// Output channels of the blocks producing levels 0, 1, 2.
  std::array<std::size_t, kFusionBlocks> fused_channels{};
  std::size_t head_channels = 8;
  double distance_scale = 1.0;
  BlockOptions block;

  /// Channels of the fused map at `level` (level 3 passes through unchanged).
  std::size_t output_channels(std::size_t level) const;
  void validate() const;
};

struct BlockWeights {
  ConvKernel mask;    ///< 1x1, fused(s+1) -> input(s)
  ConvKernel reduce;  ///< 1x1, input(s) + fused(s+1) -> c_s
  ConvKernel fuse;    ///< 3x3, c_s (or the concat width when as_printed) -> c_s
};

struct HeadWeights {
  ConvKernel merge;     ///< 3x3, fused(s) -> head_channels
  ConvKernel score;     ///< 1x1, head_channels -> 1
  ConvKernel rotation;  ///< 1x1, head_channels -> 1
  ConvKernel distance;  ///< 3x3, head_channels -> 4
};

struct FusionWeights {
  std::array<BlockWeights, kFusionBlocks> blocks;
  std::array<HeadWeights, kPyramidLevels> heads;

  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;
};

inline bool operator==(const BlockWeights& a, const BlockWeights& b) {
  return a.mask == b.mask && a.reduce == b.reduce && a.fuse == b.fuse;
}
inline bool operator==(const HeadWeights& a, const HeadWeights& b) {
  return a.merge == b.merge && a.score == b.score && a.rotation == b.rotation &&
         a.distance == b.distance;
}

/// Zero-initialised weights shaped for `config`.
FusionWeights zero_weights(const FusionConfig& config);
/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, deterministic per seed.
FusionWeights random_weights(const FusionConfig& config, std::uint64_t seed);
/// Sets every mask kernel to zero weights with a bias that saturates the
/// sigmoid, so the sigmoid mask is exactly 1.
void neutralize_masks(FusionWeights& weights);

/// Throws ConfigurationError if any kernel shape disagrees with `config`.
void check_weights(const FusionConfig& config, const FusionWeights& weights);
/// Recovers the channel layout from kernel shapes; block options keep defaults
/// except `order`, which must be supplied since both layouts can coincide.
FusionConfig infer_config(const FusionWeights& weights, ConvOrder order);

/// 1 - act(conv1x1(upsampled)).
Tensor highlight_mask(const Tensor& upsampled, const ConvKernel& mask_kernel,
                      MaskActivation activation);

struct BlockOutput {
  Tensor fused;
  Tensor mask;  ///< empty for BFF
};

/// One fusion step: `coarser` is the fused map of the next level and must have
/// exactly half the height and width of `features`.
BlockOutput fusion_block(const Tensor& features, const Tensor& coarser, const BlockWeights& weights,
                         const BlockOptions& options);

Tensor hff_block(const Tensor& features, const Tensor& coarser, const BlockWeights& weights,
                 BlockOptions options = {});
Tensor bff_block(const Tensor& features, const Tensor& coarser, const BlockWeights& weights,
                 BlockOptions options = {});

struct CascadeOutput {
  std::array<Tensor, kPyramidLevels> fused;
  std::array<Tensor, kFusionBlocks> masks;
};

/// Level 3 passes through; levels 2, 1, 0 are fused in that order.
CascadeOutput cascade(std::span<const Tensor> features, const FusionConfig& config,
                      const FusionWeights& weights);

/// Prediction head: 3x3 merge, 2x upsampling up to (out_h, out_w), then
/// score = sigmoid(1x1), rotation = (sigmoid(1x1) - 0.5) * pi and
/// distance = distance_scale * softplus(3x3).
GeometryMaps head(const Tensor& fused, const HeadWeights& weights, std::size_t out_h,
                  std::size_t out_w, double distance_scale = 1.0,
                  UpsampleMode upsample = UpsampleMode::bilinear);

/// Cascade plus one head per level; element s holds the maps of level s.
std::vector<GeometryMaps> forward(std::span<const Tensor> features, const FusionConfig& config,
                                  const FusionWeights& weights, std::size_t out_h,
                                  std::size_t out_w);

/// Fixed backbone substitute: 2x2 average pooling of `image` to 1/4, 1/8,
/// 1/16 and 1/32 of its size. Height and width must be multiples of 32.
std::vector<Tensor> average_pool_pyramid(const Tensor& image);

}  // namespace pixelhand
