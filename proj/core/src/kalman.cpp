#include "pixelhand/kalman.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "pixelhand/error.hpp"

namespace pixelhand {

namespace {

using Transition = Eigen::Matrix<double, 7, 7>;
using Observation = Eigen::Matrix<double, 4, 7>;

const Transition& transition() {
  static const Transition f = [] {
    Transition m = Transition::Identity();
    m(0, 4) = 1.0;
    m(1, 5) = 1.0;
    m(2, 6) = 1.0;
    return m;
  }();
  return f;
}

const Observation& observation() {
  static const Observation h = [] {
    Observation m = Observation::Zero();
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
  }();
  return h;
}

// Reference SORT noise settings.
const BoxKalman::Covariance& process_noise() {
  static const BoxKalman::Covariance q = [] {
    BoxKalman::Covariance m = BoxKalman::Covariance::Zero();
    m.diagonal() << 1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 1e-4;
    return m;
  }();
  return q;
}

const Eigen::Matrix4d& measurement_noise() {
  static const Eigen::Matrix4d r = [] {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.diagonal() << 1.0, 1.0, 10.0, 10.0;
    return m;
  }();
  return r;
}

}  // namespace

BoxKalman::BoxKalman(const AxisBox& box) {
  if (!(box.w > 0.0 && box.h > 0.0)) {
    throw DegenerateGeometryError("tracked boxes need positive width and height");
  }
  x_.setZero();
  x_.head<4>() = measure(box);
  p_.setZero();
  p_.diagonal() << 10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4;
}

BoxKalman::Measurement BoxKalman::measure(const AxisBox& box) {
  Measurement z;
  z << box.x + box.w / 2.0, box.y + box.h / 2.0, box.w * box.h, box.w / box.h;
  return z;
}

AxisBox BoxKalman::to_box(const State& s) {
  const double area = std::max(s(2), 0.0);
  const double aspect = std::max(s(3), 0.0);
  const double w = std::sqrt(area * aspect);
  const double h = w > 0.0 ? area / w : 0.0;
  return {s(0) - w / 2.0, s(1) - h / 2.0, w, h};
}

AxisBox BoxKalman::predict() {
  if (x_(2) + x_(6) <= 0.0) x_(6) = 0.0;
  x_ = transition() * x_;
  p_ = transition() * p_ * transition().transpose() + process_noise();
  p_ = 0.5 * (p_ + p_.transpose()).eval();
  return box();
}

void BoxKalman::update(const AxisBox& box) {
  const Observation& h = observation();
  const Measurement y = measure(box) - h * x_;
  const Eigen::Matrix4d s = h * p_ * h.transpose() + measurement_noise();
  const Eigen::Matrix<double, 7, 4> k = p_ * h.transpose() * s.inverse();
  x_ += k * y;
  // Joseph form keeps the covariance symmetric positive semi-definite.
  const Covariance i_kh = Covariance::Identity() - k * h;
  p_ = i_kh * p_ * i_kh.transpose() + k * measurement_noise() * k.transpose();
  p_ = 0.5 * (p_ + p_.transpose()).eval();
}

AxisBox BoxKalman::box() const { return to_box(x_); }

}  // namespace pixelhand
