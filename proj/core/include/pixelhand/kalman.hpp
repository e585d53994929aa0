#pragma once

#include <Eigen/Core>

#include "pixelhand/geometry.hpp"

namespace pixelhand {

/// Constant-velocity Kalman filter over (cx, cy, area, aspect) with velocities
/// for cx, cy and area; aspect is constant.
class BoxKalman {
 public:
  using State = Eigen::Matrix<double, 7, 1>;
  using Covariance = Eigen::Matrix<double, 7, 7>;
  using Measurement = Eigen::Matrix<double, 4, 1>;

  /// Starts at `box` with zero velocity. The box must have positive size.
  explicit BoxKalman(const AxisBox& box);

  /// Advances one frame and returns the predicted box.
  AxisBox predict();
  void update(const AxisBox& box);

  AxisBox box() const;
  const State& mean() const { return x_; }
  const Covariance& covariance() const { return p_; }

  static Measurement measure(const AxisBox& box);
  static AxisBox to_box(const State& state);

 private:
  State x_;
  Covariance p_;
};

}  // namespace pixelhand
