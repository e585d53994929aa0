#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pixelhand/geometry.hpp"
#include "pixelhand/tensor.hpp"

namespace pixelhand {

inline constexpr std::size_t kMaxScales = 4;

/// Term weights. Defaults: alpha 0.01, beta 20, every scale weight 1.
struct LossWeights {
  double alpha = 0.01;
  double beta = 20.0;
  std::array<double, kMaxScales> scale_weights{1.0, 1.0, 1.0, 1.0};
  double eps0 = 1e-5;
  double eps1 = 1e-5;

  /// Throws ConfigurationError unless every weight is >= 0 and eps0, eps1 > 0.
  void validate() const;
};

/// A loss value and its gradient with respect to the prediction.
struct LossValue {
  double value = 0.0;
  Tensor gradient;
};

/// 1 - (2 sum p g + eps0) / (sum p^2 + sum g^2 + eps0) over every pixel.
LossValue dice_loss(const Tensor& pred, const Tensor& truth, double eps0);

/// 1 - mean cos(pred - truth) over pixels where mask > 0.5. Zero (with a zero
/// gradient) when the mask is empty.
LossValue rotation_loss(const Tensor& pred, const Tensor& truth, const Tensor& mask);

/// Distances of one pixel to the four sides, (top, right, bottom, left).
using SideDistances = std::array<double, 4>;

/// -ln((I + eps1) / (U + eps1)) for one pixel. `grad`, when given, receives the
/// derivative with respect to each predicted distance; at min() ties the
/// predicted branch is taken.
double iou_loss_term(const SideDistances& pred, const SideDistances& truth, double eps1,
                     SideDistances* grad = nullptr);

/// Mean of iou_loss_term over pixels where mask > 0.5 (4-channel inputs).
LossValue iou_loss(const Tensor& pred, const Tensor& truth, const Tensor& mask, double eps1);

struct ScaleLoss {
  double score = 0.0;
  double rotation = 0.0;
  double distance = 0.0;
  double combined = 0.0;  ///< alpha*score + beta*rotation + distance
};

/// Per-scale loss; regression terms are masked by truth.score > 0.5.
ScaleLoss scale_loss(const GeometryMaps& pred, const GeometryMaps& truth,
                     const LossWeights& weights);

/// sum_s w_s * L_s over 1 to 4 scales (index = scale).
double total_loss(std::span<const ScaleLoss> per_scale, const LossWeights& weights);

struct LossBreakdown {
  std::vector<ScaleLoss> scales;
  std::vector<double> weights;
  double total = 0.0;
};

LossBreakdown loss_breakdown(std::span<const GeometryMaps> pred,
                             std::span<const GeometryMaps> truth, const LossWeights& weights);

/// key=value lines: scales, s<i>.{w,l_sco,l_rot,l_dis,l_s}, total.
std::string format_breakdown(const LossBreakdown& breakdown);

}  // namespace pixelhand
