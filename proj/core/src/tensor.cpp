#include "pixelhand/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pixelhand/error.hpp"
#include "pixelhand/parallel.hpp"

namespace pixelhand {

namespace {

std::string shape_str(const Tensor& t) {
  return "(" + std::to_string(t.channels()) + "," + std::to_string(t.height()) + "," +
         std::to_string(t.width()) + ")";
}

void check_spatial(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) {
    throw ConfigurationError("tensor height and width must be at least 1");
  }
}

}  // namespace

Tensor::Tensor(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : channels_(channels), height_(height), width_(width) {
  check_spatial(height, width);
  data_.assign(channels * height * width, fill);
}

Tensor::Tensor(std::size_t channels, std::size_t height, std::size_t width,
               std::vector<double> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  check_spatial(height, width);
  if (data_.size() != channels * height * width) {
    throw ConfigurationError("tensor buffer length " + std::to_string(data_.size()) +
                             " does not match shape product");
  }
}

std::span<double> Tensor::channel(std::size_t c) {
  return std::span<double>(data_).subspan(c * plane_size(), plane_size());
}

std::span<const double> Tensor::channel(std::size_t c) const {
  return std::span<const double>(data_).subspan(c * plane_size(), plane_size());
}

Tensor Tensor::slice_channels(std::size_t first, std::size_t count) const {
  if (first + count > channels_) {
    throw ConfigurationError("channel slice out of range for tensor " + shape_str(*this));
  }
  const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * plane_size());
  return Tensor(count, height_, width_,
                std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * plane_size())));
}

ConvKernel::ConvKernel(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_size)
    : ConvKernel(out_channels, in_channels, kernel_size,
                 std::vector<double>(out_channels * in_channels * kernel_size * kernel_size, 0.0),
                 std::vector<double>(out_channels, 0.0)) {}

ConvKernel::ConvKernel(std::size_t out_channels, std::size_t in_channels, std::size_t kernel_size,
                       std::vector<double> weights, std::vector<double> bias)
    : out_channels_(out_channels),
      in_channels_(in_channels),
      kernel_size_(kernel_size),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (kernel_size != 1 && kernel_size != 3) {
    throw ConfigurationError("kernel size must be 1 or 3, got " + std::to_string(kernel_size));
  }
  if (weights_.size() != out_channels * in_channels * kernel_size * kernel_size) {
    throw ConfigurationError("kernel weight count does not match (out, in, k, k)");
  }
  if (bias_.size() != out_channels) {
    throw ConfigurationError("kernel bias length must equal out_channels");
  }
}

Tensor conv2d(const Tensor& input, const ConvKernel& kernel) {
  if (input.channels() != kernel.in_channels()) {
    throw ConfigurationError("conv2d: input has " + std::to_string(input.channels()) +
                             " channels, kernel expects " + std::to_string(kernel.in_channels()));
  }
  const std::size_t h = input.height();
  const std::size_t w = input.width();
  const std::size_t k = kernel.kernel_size();
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  Tensor out(kernel.out_channels(), h, w);

  parallel_for(0, kernel.out_channels(), [&](std::size_t o) {
    auto plane = out.channel(o);
    std::fill(plane.begin(), plane.end(), kernel.bias()[o]);
    for (std::size_t i = 0; i < kernel.in_channels(); ++i) {
      const auto src = input.channel(i);
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - pad;
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pad;
          const double wgt = kernel.weight(o, i, ky, kx);
          if (wgt == 0.0) continue;
          const std::size_t y0 = dy < 0 ? static_cast<std::size_t>(-dy) : 0;
          const std::size_t y1 = dy > 0 ? h - static_cast<std::size_t>(dy) : h;
          const std::size_t x0 = dx < 0 ? static_cast<std::size_t>(-dx) : 0;
          const std::size_t x1 = dx > 0 ? w - static_cast<std::size_t>(dx) : w;
          for (std::size_t y = y0; y < y1; ++y) {
            const std::size_t sy = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(y) + dy);
            double* dst_row = &plane[y * w];
            const double* src_row = &src[sy * w];
            for (std::size_t x = x0; x < x1; ++x) {
              dst_row[x] += wgt * src_row[static_cast<std::ptrdiff_t>(x) + dx];
            }
          }
        }
      }
    }
  });
  return out;
}

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

// Half-pixel source coordinate for output index i of a 2x upsample.
Tap bilinear_tap(std::size_t i, std::size_t in_size) {
  double src = (static_cast<double>(i) + 0.5) / 2.0 - 0.5;
  if (src < 0.0) src = 0.0;
  const auto lo = static_cast<std::size_t>(std::floor(src));
  const std::size_t hi = std::min(lo + 1, in_size - 1);
  return {lo, hi, src - static_cast<double>(lo)};
}

}  // namespace

Tensor upsample2x(const Tensor& input, UpsampleMode mode) {
  const std::size_t h = input.height();
  const std::size_t w = input.width();
  Tensor out(input.channels(), 2 * h, 2 * w);

  if (mode == UpsampleMode::nearest) {
    for (std::size_t c = 0; c < input.channels(); ++c) {
      for (std::size_t y = 0; y < 2 * h; ++y) {
        for (std::size_t x = 0; x < 2 * w; ++x) out.at(c, y, x) = input.at(c, y / 2, x / 2);
      }
    }
    return out;
  }

  std::vector<Tap> ytaps(2 * h);
  std::vector<Tap> xtaps(2 * w);
  for (std::size_t y = 0; y < 2 * h; ++y) ytaps[y] = bilinear_tap(y, h);
  for (std::size_t x = 0; x < 2 * w; ++x) xtaps[x] = bilinear_tap(x, w);

  for (std::size_t c = 0; c < input.channels(); ++c) {
    for (std::size_t y = 0; y < 2 * h; ++y) {
      const Tap ty = ytaps[y];
      for (std::size_t x = 0; x < 2 * w; ++x) {
        const Tap tx = xtaps[x];
        const double top =
            (1.0 - tx.frac) * input.at(c, ty.lo, tx.lo) + tx.frac * input.at(c, ty.lo, tx.hi);
        const double bottom =
            (1.0 - tx.frac) * input.at(c, ty.hi, tx.lo) + tx.frac * input.at(c, ty.hi, tx.hi);
        out.at(c, y, x) = (1.0 - ty.frac) * top + ty.frac * bottom;
      }
    }
  }
  return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (!a.same_spatial(b)) {
    throw ConfigurationError("concat_channels: spatial mismatch " + shape_str(a) + " vs " +
                             shape_str(b));
  }
  std::vector<double> data;
  data.reserve(a.size() + b.size());
  data.insert(data.end(), a.data().begin(), a.data().end());
  data.insert(data.end(), b.data().begin(), b.data().end());
  return Tensor(a.channels() + b.channels(), a.height(), a.width(), std::move(data));
}

namespace {

double apply(double lhs, double rhs, ElementwiseOp op) {
  switch (op) {
    case ElementwiseOp::mul:
      return lhs * rhs;
    case ElementwiseOp::add:
      return lhs + rhs;
    case ElementwiseOp::sub:
      return lhs - rhs;
  }
  return 0.0;
}

}  // namespace

Tensor elementwise(const Tensor& a, const Tensor& b, ElementwiseOp op) {
  if (!a.same_shape(b)) {
    throw ConfigurationError("elementwise: shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  }
  Tensor out = a;
  auto dst = out.data();
  const auto rhs = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = apply(dst[i], rhs[i], op);
  return out;
}

Tensor elementwise(const Tensor& a, double scalar, ElementwiseOp op) {
  Tensor out = a;
  for (double& v : out.data()) v = apply(v, scalar, op);
  return out;
}

Tensor elementwise(double scalar, const Tensor& a, ElementwiseOp op) {
  Tensor out = a;
  for (double& v : out.data()) v = apply(scalar, v, op);
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

Tensor sigmoid(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = sigmoid(v);
  return out;
}

Tensor softplus(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = softplus(v);
  return out;
}

Tensor average_pool2x(const Tensor& input) {
  if (input.height() < 2 || input.width() < 2) {
    throw ConfigurationError("average_pool2x needs at least 2x2 input, got " + shape_str(input));
  }
  const std::size_t h = input.height() / 2;
  const std::size_t w = input.width() / 2;
  Tensor out(input.channels(), h, w);
  for (std::size_t c = 0; c < input.channels(); ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        out.at(c, y, x) = 0.25 * (input.at(c, 2 * y, 2 * x) + input.at(c, 2 * y, 2 * x + 1) +
                                  input.at(c, 2 * y + 1, 2 * x) + input.at(c, 2 * y + 1, 2 * x + 1));
      }
    }
  }
  return out;
}

}  // namespace pixelhand
