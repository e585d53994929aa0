#include "pixelhand/losses.hpp"

#include <algorithm>
#include <cmath>

#include "pixelhand/error.hpp"
#include "pixelhand/text_format.hpp"

namespace pixelhand {

void LossWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigurationError("alpha and beta must be >= 0");
  for (double w : scale_weights) {
    if (!(w >= 0.0)) throw ConfigurationError("scale weights must be >= 0");
  }
  if (!(eps0 > 0.0) || !(eps1 > 0.0)) throw ConfigurationError("eps0 and eps1 must be > 0");
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) throw ConfigurationError(std::string(what) + ": shape mismatch");
}

void require_mask(const Tensor& mask, const Tensor& like, const char* what) {
  if (mask.channels() != 1 || !mask.same_spatial(like)) {
    throw ConfigurationError(std::string(what) + ": mask must be (1,H,W) matching the maps");
  }
}

}  // namespace

LossValue dice_loss(const Tensor& pred, const Tensor& truth, double eps0) {
  require_same_shape(pred, truth, "dice_loss");
  if (!(eps0 > 0.0)) throw ConfigurationError("dice_loss: eps0 must be > 0");
  const auto p = pred.data();
  const auto g = truth.data();
  double pg = 0.0, pp = 0.0, gg = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    pg += p[i] * g[i];
    pp += p[i] * p[i];
    gg += g[i] * g[i];
  }
  const double num = 2.0 * pg + eps0;
  const double den = pp + gg + eps0;
  LossValue out{1.0 - num / den, Tensor(pred.channels(), pred.height(), pred.width())};
  auto grad = out.gradient.data();
  const double den2 = den * den;
  for (std::size_t i = 0; i < p.size(); ++i) {
    grad[i] = -(2.0 * g[i] * den - num * 2.0 * p[i]) / den2;
  }
  return out;
}

LossValue rotation_loss(const Tensor& pred, const Tensor& truth, const Tensor& mask) {
  require_same_shape(pred, truth, "rotation_loss");
  require_mask(mask, pred, "rotation_loss");
  LossValue out{0.0, Tensor(pred.channels(), pred.height(), pred.width())};
  const auto m = mask.data();
  std::size_t n = 0;
  for (double v : m) n += v > 0.5 ? 1 : 0;
  if (n == 0) return out;
  const auto p = pred.data();
  const auto t = truth.data();
  auto grad = out.gradient.data();
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t plane = pred.plane_size();
  double cos_sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(m[i % plane] > 0.5)) continue;
    const double diff = p[i] - t[i];
    cos_sum += std::cos(diff);
    grad[i] = std::sin(diff) * inv_n;
  }
  out.value = 1.0 - cos_sum * inv_n;
  return out;
}

double iou_loss_term(const SideDistances& pred, const SideDistances& truth, double eps1,
                     SideDistances* grad) {
  enum { kTop = 0, kRight = 1, kBottom = 2, kLeft = 3 };
  const auto pick = [&](int side) { return std::min(pred[side], truth[side]); };
  const double ih = pick(kTop) + pick(kBottom);
  const double iw = pick(kLeft) + pick(kRight);
  const double inter = ih * iw;
  const double area_truth = (truth[kTop] + truth[kBottom]) * (truth[kLeft] + truth[kRight]);
  const double pred_h = pred[kTop] + pred[kBottom];
  const double pred_w = pred[kLeft] + pred[kRight];
  const double area_pred = pred_h * pred_w;
  const double uni = area_truth + area_pred - inter;
  const double value = -std::log((inter + eps1) / (uni + eps1));

  if (grad != nullptr) {
    // d/dx [-ln(I+e) + ln(U+e)] with U = X + Xp - I.
    const double a = 1.0 / (inter + eps1);
    const double b = 1.0 / (uni + eps1);
    for (int side : {kTop, kBottom}) {
      const double d_inter = pred[side] <= truth[side] ? iw : 0.0;
      const double d_area = pred_w;
      (*grad)[side] = -a * d_inter + b * (d_area - d_inter);
    }
    for (int side : {kLeft, kRight}) {
      const double d_inter = pred[side] <= truth[side] ? ih : 0.0;
      const double d_area = pred_h;
      (*grad)[side] = -a * d_inter + b * (d_area - d_inter);
    }
  }
  return value;
}

LossValue iou_loss(const Tensor& pred, const Tensor& truth, const Tensor& mask, double eps1) {
  require_same_shape(pred, truth, "iou_loss");
  if (pred.channels() != 4) throw ConfigurationError("iou_loss: distance maps need 4 channels");
  require_mask(mask, pred, "iou_loss");
  if (!(eps1 > 0.0)) throw ConfigurationError("iou_loss: eps1 must be > 0");
  LossValue out{0.0, Tensor(4, pred.height(), pred.width())};
  const auto m = mask.data();
  const std::size_t plane = pred.plane_size();
  std::size_t n = 0;
  for (double v : m) n += v > 0.5 ? 1 : 0;
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < plane; ++i) {
    if (!(m[i] > 0.5)) continue;
    SideDistances p{}, t{}, g{};
    for (std::size_t c = 0; c < 4; ++c) {
      p[c] = pred.channel(c)[i];
      t[c] = truth.channel(c)[i];
      if (p[c] < 0.0 || t[c] < 0.0) {
        throw ConfigurationError("iou_loss: distances must be non-negative on positive pixels");
      }
    }
    sum += iou_loss_term(p, t, eps1, &g);
    for (std::size_t c = 0; c < 4; ++c) out.gradient.channel(c)[i] = g[c] * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

ScaleLoss scale_loss(const GeometryMaps& pred, const GeometryMaps& truth,
                     const LossWeights& weights) {
  weights.validate();
  if (pred.height() != truth.height() || pred.width() != truth.width()) {
    throw ConfigurationError("scale_loss: predicted and truth maps differ in size");
  }
  Tensor mask = truth.score;
  for (double& v : mask.data()) v = v > 0.5 ? 1.0 : 0.0;
  ScaleLoss out;
  out.score = dice_loss(pred.score, truth.score, weights.eps0).value;
  out.rotation = rotation_loss(pred.rotation, truth.rotation, mask).value;
  out.distance = iou_loss(pred.distance, truth.distance, mask, weights.eps1).value;
  out.combined = weights.alpha * out.score + weights.beta * out.rotation + out.distance;
  return out;
}

double total_loss(std::span<const ScaleLoss> per_scale, const LossWeights& weights) {
  if (per_scale.empty() || per_scale.size() > kMaxScales) {
    throw ConfigurationError("total_loss needs between 1 and 4 scales");
  }
  weights.validate();
  double total = 0.0;
  for (std::size_t s = 0; s < per_scale.size(); ++s) {
    total += weights.scale_weights[s] * per_scale[s].combined;
  }
  return total;
}

LossBreakdown loss_breakdown(std::span<const GeometryMaps> pred,
                             std::span<const GeometryMaps> truth, const LossWeights& weights) {
  if (pred.size() != truth.size()) {
    throw ConfigurationError("loss_breakdown: " + std::to_string(pred.size()) +
                             " predicted scales vs " + std::to_string(truth.size()) + " truth scales");
  }
  LossBreakdown out;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    out.scales.push_back(scale_loss(pred[s], truth[s], weights));
    if (s < kMaxScales) out.weights.push_back(weights.scale_weights[s]);
  }
  out.total = total_loss(out.scales, weights);
  return out;
}

std::string format_breakdown(const LossBreakdown& breakdown) {
  std::string text = "scales=" + std::to_string(breakdown.scales.size()) + "\n";
  for (std::size_t s = 0; s < breakdown.scales.size(); ++s) {
    const auto& l = breakdown.scales[s];
    const std::string prefix = "s" + std::to_string(s) + ".";
    text += prefix + "w=" + format_double(breakdown.weights[s]) + "\n";
    text += prefix + "l_sco=" + format_double(l.score) + "\n";
    text += prefix + "l_rot=" + format_double(l.rotation) + "\n";
    text += prefix + "l_dis=" + format_double(l.distance) + "\n";
    text += prefix + "l_s=" + format_double(l.combined) + "\n";
  }
  text += "total=" + format_double(breakdown.total) + "\n";
  return text;
}

}  // namespace pixelhand
