#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pixelhand {

/// Dense (channels, height, width) array, channel-outermost row-major.
///
/// Height and width are always at least one. A tensor may have zero
/// channels; such a tensor is the identity of concat_channels.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);
  Tensor(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t plane_size() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * height_ + y) * width_ + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * height_ + y) * width_ + x];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  std::span<double> channel(std::size_t c);
  std::span<const double> channel(std::size_t c) const;

  /// Copies channels [first, first + count) into a new tensor.
  Tensor slice_channels(std::size_t first, std::size_t count) const;

  bool same_shape(const Tensor& other) const {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }
  bool same_spatial(const Tensor& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 1;
  std::size_t width_ = 1;
  std::vector<double> data_;
};

/// Convolution parameters. Weights are laid out (out_ch, in_ch, k, k).
class ConvKernel {
 public:
  ConvKernel() = default;
  ConvKernel(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_size);
  ConvKernel(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_size,
             std::vector<double> weights, std::vector<double> bias);

  std::size_t out_channels() const { return out_channels_; }
  std::size_t in_channels() const { return in_channels_; }
  std::size_t kernel_size() const { return kernel_size_; }

  double& weight(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) {
    return weights_[((o * in_channels_ + i) * kernel_size_ + ky) * kernel_size_ + kx];
  }
  double weight(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const {
    return weights_[((o * in_channels_ + i) * kernel_size_ + ky) * kernel_size_ + kx];
  }

  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> bias() { return bias_; }
  std::span<const double> bias() const { return bias_; }

  friend bool operator==(const ConvKernel&, const ConvKernel&) = default;

 private:
  std::size_t out_channels_ = 0;
  std::size_t in_channels_ = 0;
  std::size_t kernel_size_ = 1;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

enum class UpsampleMode { bilinear, nearest };
enum class ElementwiseOp { mul, add, sub };

/// Stride-1 convolution. 3x3 kernels zero-pad by one pixel, 1x1 kernels do not
/// pad, so the output keeps the input's spatial size.
Tensor conv2d(const Tensor& input, const ConvKernel& kernel);

/// Doubles height and width. Bilinear mode uses half-pixel centres
/// (align-corners off) with edge clamping.
Tensor upsample2x(const Tensor& input, UpsampleMode mode = UpsampleMode::bilinear);

/// Stacks b's channels after a's.
Tensor concat_channels(const Tensor& a, const Tensor& b);

Tensor elementwise(const Tensor& a, const Tensor& b, ElementwiseOp op);
Tensor elementwise(const Tensor& a, double scalar, ElementwiseOp op);
/// scalar (op) a, e.g. 1 - a for ElementwiseOp::sub.
Tensor elementwise(double scalar, const Tensor& a, ElementwiseOp op);

Tensor sigmoid(const Tensor& input);
Tensor softplus(const Tensor& input);

/// Numerically stable scalar activations shared by the tensor ops and heads.
double sigmoid(double x);
double softplus(double x);

/// 2x2 mean pooling with stride 2; odd trailing rows/columns are dropped.
Tensor average_pool2x(const Tensor& input);

}  // namespace pixelhand
