#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "pixelhand/geometry.hpp"

namespace pixelhand {

inline constexpr double kDefaultScoreThreshold = 0.8;
inline constexpr double kDefaultNmsThreshold = 0.2;
inline constexpr std::size_t kDefaultCandidateCap = 20000;

struct DecodeOptions {
  double score_threshold = kDefaultScoreThreshold;
  double nms_threshold = kDefaultNmsThreshold;
  /// Highest-scoring candidates kept before NMS (ties in raster order).
  std::size_t max_candidates = kDefaultCandidateCap;
};

/// One restored box per pixel with score > threshold, in raster order, each
/// scored with its pixel's score. Pixels whose geometry is degenerate or out
/// of range are skipped.
std::vector<RotatedBox> decode_candidates(
    const GeometryMaps& maps, double score_threshold,
    std::size_t max_candidates = std::numeric_limits<std::size_t>::max());

/// Candidates followed by greedy NMS; output sorted by descending score.
std::vector<RotatedBox> decode(const GeometryMaps& maps, const DecodeOptions& options = {});

struct SceneOptions {
  std::size_t height = 256;
  std::size_t width = 256;
  std::size_t boxes = 3;
  double theta_min = -0.7853981633974483;
  double theta_max = 0.7853981633974483;
  double size_min = 16.0;
  double size_max = 64.0;
  double shrink = 0.1;
  /// Pairwise IoU above this is rejected.
  double max_pair_iou = 0.1;
  /// Minimum fraction of each box area inside the frame.
  double min_inside = 0.6;
  std::size_t max_rejections = 10000;
};

struct Scene {
  std::vector<RotatedBox> boxes;
  GeometryMaps maps;
};

/// Random rotated boxes plus their encoded maps, reproducible per seed.
/// Throws GenerationError after `max_rejections` rejected draws.
Scene generate_scene(std::uint64_t seed, const SceneOptions& options);

struct SequenceOptions {
  SceneOptions scene;
  std::size_t frames = 50;
  /// Per-frame speed bound of each box centre, in pixels.
  double max_speed = 1.5;
  /// Per-frame angular speed bound, in radians.
  double max_spin = 0.0;
};

/// Boxes moving at constant velocity. frames[f][k] is object k (id k + 1) in
/// frame f; every object is present in every frame.
struct Sequence {
  std::vector<std::vector<RotatedBox>> frames;
};

Sequence generate_sequence(std::uint64_t seed, const SequenceOptions& options);

/// Fraction of the box area inside [0, width-1] x [0, height-1].
double inside_fraction(const RotatedBox& box, std::size_t height, std::size_t width);

}  // namespace pixelhand
