#include "pixelhand/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "pixelhand/error.hpp"
#include "pixelhand/parallel.hpp"

namespace pixelhand {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kMinSide = 1e-6;

Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double norm(Point a) { return std::hypot(a.x, a.y); }

// Applies M(-theta), the inverse of the derotation M(theta).
Point rotate_back(double c, double s, Point v) { return {c * v.x + s * v.y, -s * v.x + c * v.y}; }

RotatedBox shifted_labels(const RotatedBox& box, int shift) {
  RotatedBox out = box;
  for (int i = 0; i < 4; ++i) out.vertices[i] = box.vertices[(i + shift) % 4];
  return out;
}

}  // namespace

double axis_iou(const AxisBox& a, const AxisBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

RectFrame RotatedBox::frame() const {
  const Point base = vertices[2] - vertices[3];
  return {vertices[3], norm(base), norm(vertices[0] - vertices[3]), std::atan2(-base.y, base.x)};
}

double RotatedBox::width() const { return norm(vertices[2] - vertices[3]); }
double RotatedBox::height() const { return norm(vertices[0] - vertices[3]); }
double RotatedBox::angle() const { return frame().theta; }
double RotatedBox::area() const { return std::abs(polygon_area(vertices)); }

Point RotatedBox::center() const {
  return {0.25 * (vertices[0].x + vertices[1].x + vertices[2].x + vertices[3].x),
          0.25 * (vertices[0].y + vertices[1].y + vertices[2].y + vertices[3].y)};
}

AxisBox RotatedBox::hull() const {
  double x0 = vertices[0].x, x1 = vertices[0].x, y0 = vertices[0].y, y1 = vertices[0].y;
  for (const auto& v : vertices) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

RotatedBox make_box(Point center, double width, double height, double theta, double score) {
  if (!(width >= kMinSide) || !(height >= kMinSide)) {
    throw DegenerateGeometryError("box width and height must be at least 1e-6 px");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double hw = 0.5 * width;
  const double hh = 0.5 * height;
  RotatedBox box;
  box.score = score;
  box.vertices = {center + rotate_back(c, s, {-hw, -hh}), center + rotate_back(c, s, {hw, -hh}),
                  center + rotate_back(c, s, {hw, hh}), center + rotate_back(c, s, {-hw, hh})};
  return box;
}

RotatedBox make_box(const AxisBox& box, double score) {
  if (!(box.w >= kMinSide) || !(box.h >= kMinSide)) {
    throw DegenerateGeometryError("box width and height must be at least 1e-6 px");
  }
  RotatedBox out;
  out.score = score;
  out.vertices = {Point{box.x, box.y}, Point{box.right(), box.y}, Point{box.right(), box.bottom()},
                  Point{box.x, box.bottom()}};
  return out;
}

RotatedBox restore_box(Point pixel, const PixelGeometry& g) {
  if (g.top < 0.0 || g.right < 0.0 || g.bottom < 0.0 || g.left < 0.0) {
    throw ConfigurationError("restore_box: distances must be non-negative");
  }
  if (!(g.theta > -kHalfPi && g.theta < kHalfPi)) {
    throw ConfigurationError("restore_box: theta must lie in (-pi/2, pi/2)");
  }
  const double width = g.left + g.right;
  const double height = g.top + g.bottom;
  if (width < kMinSide || height < kMinSide) {
    throw DegenerateGeometryError("restore_box: zero width or height");
  }
  const double c = std::cos(g.theta);
  const double s = std::sin(g.theta);
  // Coordinates of the pixel in the frame anchored at p3, then p3 itself.
  const Point local = rotate_back(c, s, {g.left, -g.bottom});
  const Point p3 = pixel - local;
  RotatedBox box;
  box.vertices = {p3 + rotate_back(c, s, {0.0, -height}), p3 + rotate_back(c, s, {width, -height}),
                  p3 + rotate_back(c, s, {width, 0.0}), p3};
  return box;
}

PixelGeometry pixel_geometry(const RectFrame& frame, Point pixel) {
  const double c = std::cos(frame.theta);
  const double s = std::sin(frame.theta);
  const Point d = pixel - frame.origin;
  const double lx = c * d.x - s * d.y;
  const double ly = s * d.x + c * d.y;
  return {frame.height + ly, frame.width - lx, -ly, lx, frame.theta};
}

RotatedBox canonical_box(const RotatedBox& box) {
  for (const auto& v : box.vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw ConfigurationError("box vertex is not finite");
    }
  }
  const Point base = box.vertices[2] - box.vertices[3];
  const Point side = box.vertices[0] - box.vertices[3];
  const double w = norm(base);
  const double h = norm(side);
  if (w < kMinSide || h < kMinSide || norm(box.vertices[1] - box.vertices[0]) < kMinSide ||
      norm(box.vertices[2] - box.vertices[1]) < kMinSide) {
    throw DegenerateGeometryError("degenerate rectangle (side below 1e-6 px)");
  }
  const double tol = 1e-6 * std::max(1.0, std::max(w, h));
  // Parallelogram: p1 - p0 == p2 - p3, plus a right angle at p3.
  const Point top = box.vertices[1] - box.vertices[0];
  if (norm(top - base) > tol) {
    throw ConfigurationError("box is not a rectangle: opposite sides differ");
  }
  if (std::abs(dot(base, side)) / (w * h) > 1e-6) {
    throw ConfigurationError("box is not a rectangle: corner angle is not 90 degrees");
  }

  RotatedBox out = box;
  if (cross(base, side) > 0.0) {
    // Mirrored winding: relabel to TL, TR, BR, BL.
    out.vertices = {box.vertices[1], box.vertices[0], box.vertices[3], box.vertices[2]};
  }
  const double theta = out.angle();
  constexpr double kSnap = 1e-9;
  if (theta >= kHalfPi - kSnap && theta <= kHalfPi + kSnap) {
    out = shifted_labels(out, 1);
  } else if (theta <= -kHalfPi + kSnap && theta >= -kHalfPi - kSnap) {
    out = shifted_labels(out, 3);
  } else if (theta > kHalfPi || theta < -kHalfPi) {
    out = shifted_labels(out, 2);
  }
  return out;
}

GeometryMaps::GeometryMaps(std::size_t height, std::size_t width)
    : score(1, height, width), rotation(1, height, width), distance(4, height, width) {}

GeometryMaps::GeometryMaps(Tensor score_map, Tensor rotation_map, Tensor distance_map)
    : score(std::move(score_map)), rotation(std::move(rotation_map)), distance(std::move(distance_map)) {
  if (score.channels() != 1 || rotation.channels() != 1 || distance.channels() != 4) {
    throw ConfigurationError("geometry maps need 1 score, 1 rotation and 4 distance channels");
  }
  if (!score.same_spatial(rotation) || !score.same_spatial(distance)) {
    throw ConfigurationError("geometry maps must share height and width");
  }
}

Tensor GeometryMaps::pack() const {
  return concat_channels(concat_channels(score, rotation), distance);
}

GeometryMaps GeometryMaps::unpack(const Tensor& packed) {
  if (packed.channels() != 6) {
    throw ConfigurationError("packed geometry maps need 6 channels, got " +
                             std::to_string(packed.channels()));
  }
  return GeometryMaps(packed.slice_channels(0, 1), packed.slice_channels(1, 1),
                      packed.slice_channels(2, 4));
}

void validate_maps(const GeometryMaps& maps) {
  if (maps.score.channels() != 1 || maps.rotation.channels() != 1 || maps.distance.channels() != 4 ||
      !maps.score.same_spatial(maps.rotation) || !maps.score.same_spatial(maps.distance)) {
    throw ConfigurationError("geometry maps have inconsistent shapes");
  }
  const auto score = maps.score.data();
  const auto rot = maps.rotation.data();
  const std::size_t plane = maps.score.plane_size();
  for (std::size_t i = 0; i < plane; ++i) {
    if (!(score[i] >= 0.0 && score[i] <= 1.0)) {
      throw ConfigurationError("score map value outside [0, 1]");
    }
    if (!(rot[i] > -kHalfPi && rot[i] < kHalfPi)) {
      throw ConfigurationError("rotation map value outside (-pi/2, pi/2)");
    }
    if (score[i] > 0.0) {
      for (std::size_t c = 0; c < 4; ++c) {
        if (!(maps.distance.channel(c)[i] >= 0.0)) {
          throw ConfigurationError("negative distance on a positive pixel");
        }
      }
    }
  }
}

GeometryMaps encode_ground_truth(std::span<const RotatedBox> boxes, std::size_t height,
                                 std::size_t width, double shrink) {
  if (!(shrink >= 0.0 && shrink < 0.5)) {
    throw ConfigurationError("shrink ratio must lie in [0, 0.5)");
  }
  GeometryMaps maps(height, width);
  std::vector<double> owner_area(height * width, std::numeric_limits<double>::infinity());

  for (const auto& raw : boxes) {
    const RotatedBox box = canonical_box(raw);
    const RectFrame frame = box.frame();
    const double area = frame.width * frame.height;
    const double margin_x = shrink * frame.width;
    const double margin_y = shrink * frame.height;
    const AxisBox hull = box.hull();
    const double fy0 = std::max(0.0, std::ceil(hull.y));
    const double fy1 = std::min(static_cast<double>(height) - 1.0, std::floor(hull.bottom()));
    const double fx0 = std::max(0.0, std::ceil(hull.x));
    const double fx1 = std::min(static_cast<double>(width) - 1.0, std::floor(hull.right()));
    if (fy1 < fy0 || fx1 < fx0) continue;
    const auto y0 = static_cast<std::size_t>(fy0);
    const auto y1 = static_cast<std::size_t>(fy1);
    const auto x0 = static_cast<std::size_t>(fx0);
    const auto x1 = static_cast<std::size_t>(fx1);

    parallel_for(y0, y1 + 1, [&](std::size_t y) {
      for (std::size_t x = x0; x <= x1; ++x) {
        const PixelGeometry g =
            pixel_geometry(frame, {static_cast<double>(x), static_cast<double>(y)});
        if (g.left < margin_x || g.right < margin_x || g.top < margin_y || g.bottom < margin_y) {
          continue;
        }
        const std::size_t idx = y * width + x;
        if (!(area < owner_area[idx])) continue;
        owner_area[idx] = area;
        maps.score.at(0, y, x) = 1.0;
        maps.rotation.at(0, y, x) = frame.theta;
        maps.distance.at(0, y, x) = g.top;
        maps.distance.at(1, y, x) = g.right;
        maps.distance.at(2, y, x) = g.bottom;
        maps.distance.at(3, y, x) = g.left;
      }
    });
  }
  return maps;
}

double polygon_area(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

namespace {

std::vector<Point> counter_clockwise(std::span<const Point> polygon) {
  std::vector<Point> out(polygon.begin(), polygon.end());
  if (polygon_area(out) < 0.0) std::reverse(out.begin(), out.end());
  return out;
}

Point line_intersection(Point p, Point q, Point a, Point b) {
  const Point r = q - p;
  const Point e = b - a;
  const double denom = cross(r, e);
  if (denom == 0.0) return p;
  const double t = cross(a - p, e) / denom;
  return {p.x + t * r.x, p.y + t * r.y};
}

}  // namespace

std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip) {
  std::vector<Point> output = counter_clockwise(subject);
  const std::vector<Point> window = counter_clockwise(clip);
  const std::size_t m = window.size();
  for (std::size_t j = 0; j < m && !output.empty(); ++j) {
    const Point a = window[j];
    const Point b = window[(j + 1) % m];
    const auto inside = [&](Point p) { return cross(b - a, p - a) >= 0.0; };
    std::vector<Point> input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Point cur = input[i];
      const Point prev = input[(i + input.size() - 1) % input.size()];
      const bool cur_in = inside(cur);
      const bool prev_in = inside(prev);
      if (cur_in) {
        if (!prev_in) output.push_back(line_intersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(line_intersection(prev, cur, a, b));
      }
    }
  }
  return output;
}

double rotated_iou(const RotatedBox& a, const RotatedBox& b) {
  if (axis_iou(a.hull(), b.hull()) == 0.0) return 0.0;
  const double area_a = a.area();
  const double area_b = b.area();
  const auto inter_poly = clip_convex(a.vertices, b.vertices);
  const double inter = std::abs(polygon_area(inter_poly));
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<RotatedBox> nms(std::span<const RotatedBox> boxes, double iou_threshold) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return boxes[i].score > boxes[j].score;
  });
  std::vector<RotatedBox> kept;
  for (std::size_t idx : order) {
    const RotatedBox& candidate = boxes[idx];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const RotatedBox& k) {
      return rotated_iou(k, candidate) > iou_threshold;
    });
    if (!suppressed) kept.push_back(candidate);
  }
  return kept;
}

}  // namespace pixelhand
