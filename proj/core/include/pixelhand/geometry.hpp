#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pixelhand/tensor.hpp"

namespace pixelhand {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in (left, top, width, height) form, as used by the
/// tracking annotations and the `x y w h` box import.
struct AxisBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  friend bool operator==(const AxisBox&, const AxisBox&) = default;
};

double axis_iou(const AxisBox& a, const AxisBox& b);

/// Distances from a pixel to the four sides of its box plus the box angle.
struct PixelGeometry {
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;
  double left = 0.0;
  double theta = 0.0;
};

/// Position, size and angle of a rectangle in its derotated frame: `origin`
/// is p3 (bottom-left), width runs p3->p2 and height runs p3->p0.
struct RectFrame {
  Point origin;
  double width = 0.0;
  double height = 0.0;
  double theta = 0.0;
};

/// Rectangle with vertices p0 (top-left), p1 (top-right), p2 (bottom-right),
/// p3 (bottom-left) in its derotated frame. Image coordinates: x right, y down;
/// positive angles are counter-clockwise on screen.
struct RotatedBox {
  std::array<Point, 4> vertices{};
  double score = 1.0;

  RectFrame frame() const;
  double width() const;
  double height() const;
  double angle() const;
  double area() const;
  Point center() const;
  AxisBox hull() const;

  friend bool operator==(const RotatedBox&, const RotatedBox&) = default;
};

/// Builds the rectangle centred at `center` with the given size and angle.
RotatedBox make_box(Point center, double width, double height, double theta, double score = 1.0);
RotatedBox make_box(const AxisBox& box, double score = 1.0);

/// Rebuilds a box from one pixel's distances and angle. Throws
/// DegenerateGeometryError when the width or height is below 1e-6 px and
/// ConfigurationError when a distance is negative or theta is outside
/// (-pi/2, pi/2).
RotatedBox restore_box(Point pixel, const PixelGeometry& geometry);

/// Inverse of restore_box for one pixel: signed distances to each side.
/// Negative distances mean the pixel is outside that side.
PixelGeometry pixel_geometry(const RectFrame& frame, Point pixel);

/// Checks the rectangle invariants (opposite sides equal, right angles,
/// non-degenerate) and relabels the vertices so the angle lies in
/// (-pi/2, pi/2). Throws DegenerateGeometryError or ConfigurationError.
RotatedBox canonical_box(const RotatedBox& box);

/// Score, rotation and distance maps. Distance channels are (top, right,
/// bottom, left).
struct GeometryMaps {
  Tensor score;
  Tensor rotation;
  Tensor distance;

  GeometryMaps() = default;
  GeometryMaps(std::size_t height, std::size_t width);
  GeometryMaps(Tensor score_map, Tensor rotation_map, Tensor distance_map);

  std::size_t height() const { return score.height(); }
  std::size_t width() const { return score.width(); }

  /// Packs into one (6,H,W) tensor: score, rotation, top, right, bottom, left.
  Tensor pack() const;
  static GeometryMaps unpack(const Tensor& packed);

  friend bool operator==(const GeometryMaps&, const GeometryMaps&) = default;
};

/// Throws ConfigurationError if the maps break the value-range invariants.
void validate_maps(const GeometryMaps& maps);

inline constexpr double kDefaultShrink = 0.1;

/// Rasterises ground-truth boxes into training targets. A pixel is positive
/// when it lies inside a box shrunk by `shrink` of the width (left/right) and
/// height (top/bottom) on every side; overlapping pixels belong to the
/// smallest-area box, ties to the earlier box.
GeometryMaps encode_ground_truth(std::span<const RotatedBox> boxes, std::size_t height,
                                 std::size_t width, double shrink = kDefaultShrink);

double polygon_area(std::span<const Point> polygon);
/// Intersection of two convex polygons (any winding) by Sutherland-Hodgman.
std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip);

double rotated_iou(const RotatedBox& a, const RotatedBox& b);

/// Greedy suppression in descending score order (ties by input order): a box
/// is dropped when its IoU with an already kept box exceeds the threshold.
std::vector<RotatedBox> nms(std::span<const RotatedBox> boxes, double iou_threshold);

}  // namespace pixelhand
