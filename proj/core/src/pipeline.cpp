#include "pixelhand/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pixelhand/error.hpp"
#include "pixelhand/random.hpp"

namespace pixelhand {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_scene_options(const SceneOptions& o) {
  if (o.height == 0 || o.width == 0) throw ConfigurationError("scene size must be positive");
  if (!(o.theta_min > -kHalfPi && o.theta_max < kHalfPi && o.theta_min <= o.theta_max)) {
    throw ConfigurationError("theta range must lie inside (-pi/2, pi/2)");
  }
  if (!(o.size_min >= 1.0 && o.size_min <= o.size_max)) {
    throw ConfigurationError("size range must satisfy 1 <= min <= max");
  }
  if (!(o.min_inside > 0.0 && o.min_inside <= 1.0)) {
    throw ConfigurationError("min_inside must lie in (0, 1]");
  }
}

bool center_inside(const RotatedBox& box, std::size_t height, std::size_t width) {
  const Point c = box.center();
  return c.x >= 0.0 && c.y >= 0.0 && c.x <= static_cast<double>(width) - 1.0 &&
         c.y <= static_cast<double>(height) - 1.0;
}

struct Shape {
  double w, h, theta;
};

Shape draw_shape(Rng& rng, const SceneOptions& o) {
  const double w = rng.uniform(o.size_min, o.size_max);
  const double h = rng.uniform(o.size_min, o.size_max);
  const double theta = rng.uniform(o.theta_min, o.theta_max);
  return {w, h, theta};
}

Point draw_center(Rng& rng, const SceneOptions& o) {
  return {rng.uniform(0.0, static_cast<double>(o.width) - 1.0),
          rng.uniform(0.0, static_cast<double>(o.height) - 1.0)};
}

bool placeable(const RotatedBox& box, const std::vector<RotatedBox>& others,
               const SceneOptions& o) {
  if (!center_inside(box, o.height, o.width)) return false;
  if (inside_fraction(box, o.height, o.width) < o.min_inside) return false;
  return std::all_of(others.begin(), others.end(), [&](const RotatedBox& other) {
    return rotated_iou(box, other) <= o.max_pair_iou;
  });
}

}  // namespace

double inside_fraction(const RotatedBox& box, std::size_t height, std::size_t width) {
  const double r = static_cast<double>(width) - 1.0;
  const double b = static_cast<double>(height) - 1.0;
  const std::array<Point, 4> frame{Point{0.0, 0.0}, Point{r, 0.0}, Point{r, b}, Point{0.0, b}};
  const auto inside = clip_convex(box.vertices, frame);
  const double area = box.area();
  return area > 0.0 ? std::abs(polygon_area(inside)) / area : 0.0;
}

std::vector<RotatedBox> decode_candidates(const GeometryMaps& maps, double score_threshold,
                                          std::size_t max_candidates) {
  const std::size_t h = maps.height();
  const std::size_t w = maps.width();
  std::vector<RotatedBox> candidates;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double score = maps.score.at(0, y, x);
      if (!(score > score_threshold)) continue;
      const PixelGeometry g{maps.distance.at(0, y, x), maps.distance.at(1, y, x),
                            maps.distance.at(2, y, x), maps.distance.at(3, y, x),
                            maps.rotation.at(0, y, x)};
      if (!(g.top >= 0.0 && g.right >= 0.0 && g.bottom >= 0.0 && g.left >= 0.0) ||
          !(g.theta > -kHalfPi && g.theta < kHalfPi) || g.top + g.bottom < 1e-6 ||
          g.left + g.right < 1e-6) {
        continue;
      }
      RotatedBox box = restore_box({static_cast<double>(x), static_cast<double>(y)}, g);
      box.score = score;
      candidates.push_back(box);
    }
  }
  if (candidates.size() > max_candidates) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return candidates[a].score > candidates[b].score;
    });
    order.resize(max_candidates);
    std::sort(order.begin(), order.end());
    std::vector<RotatedBox> capped;
    capped.reserve(max_candidates);
    for (std::size_t i : order) capped.push_back(candidates[i]);
    candidates = std::move(capped);
  }
  return candidates;
}

std::vector<RotatedBox> decode(const GeometryMaps& maps, const DecodeOptions& options) {
  const auto candidates = decode_candidates(maps, options.score_threshold, options.max_candidates);
  return nms(candidates, options.nms_threshold);
}

Scene generate_scene(std::uint64_t seed, const SceneOptions& options) {
  check_scene_options(options);
  Rng rng(seed);
  Scene scene;
  std::size_t rejections = 0;
  while (scene.boxes.size() < options.boxes) {
    const Shape shape = draw_shape(rng, options);
    const RotatedBox box = make_box(draw_center(rng, options), shape.w, shape.h, shape.theta);
    if (placeable(box, scene.boxes, options)) {
      scene.boxes.push_back(box);
    } else if (++rejections >= options.max_rejections) {
      throw GenerationError("could not place " + std::to_string(options.boxes) + " boxes after " +
                            std::to_string(rejections) + " rejections");
    }
  }
  scene.maps = encode_ground_truth(scene.boxes, options.height, options.width, options.shrink);
  return scene;
}

Sequence generate_sequence(std::uint64_t seed, const SequenceOptions& options) {
  check_scene_options(options.scene);
  if (options.frames == 0) throw ConfigurationError("a sequence needs at least one frame");
  const SceneOptions& o = options.scene;
  Rng rng(seed);

  struct Track {
    Point start;
    Point velocity;
    Shape shape;
    double spin;
  };
  const auto box_at = [](const Track& t, std::size_t f) {
    const double k = static_cast<double>(f);
    return make_box({t.start.x + k * t.velocity.x, t.start.y + k * t.velocity.y}, t.shape.w,
                    t.shape.h, t.shape.theta + k * t.spin);
  };

  std::vector<Track> tracks;
  std::size_t rejections = 0;
  while (tracks.size() < o.boxes) {
    Track t{draw_center(rng, o), {}, draw_shape(rng, o), 0.0};
    const double speed = rng.uniform(0.0, options.max_speed);
    const double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    t.velocity = {speed * std::cos(heading), speed * std::sin(heading)};
    t.spin = rng.uniform(-options.max_spin, options.max_spin);
    const double end_theta = t.shape.theta + static_cast<double>(options.frames - 1) * t.spin;

    bool ok = end_theta > o.theta_min - 1e-12 && end_theta < o.theta_max + 1e-12;
    for (std::size_t f = 0; ok && f < options.frames; ++f) {
      std::vector<RotatedBox> others;
      for (const auto& existing : tracks) others.push_back(box_at(existing, f));
      ok = placeable(box_at(t, f), others, o);
    }
    if (ok) {
      tracks.push_back(t);
    } else if (++rejections >= o.max_rejections) {
      throw GenerationError("could not place " + std::to_string(o.boxes) + " moving boxes after " +
                            std::to_string(rejections) + " rejections");
    }
  }

  Sequence seq;
  seq.frames.resize(options.frames);
  for (std::size_t f = 0; f < options.frames; ++f) {
    for (const auto& t : tracks) seq.frames[f].push_back(box_at(t, f));
  }
  return seq;
}

}  // namespace pixelhand
