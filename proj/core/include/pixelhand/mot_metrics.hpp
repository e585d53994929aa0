#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "pixelhand/tracking.hpp"

namespace pixelhand {

struct MotReport {
  std::size_t gt = 0;  ///< ground-truth boxes over all frames
  std::size_t matches = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ids = 0;
  std::size_t frag = 0;
  std::size_t gt_tracks = 0;
  std::size_t mt = 0;  ///< tracked for more than 80% of their frames
  std::size_t pt = 0;
  std::size_t ml = 0;  ///< tracked for less than 20% of their frames
  double mota = 0.0;
  double motp = 0.0;  ///< mean IoU of matches; NaN without matches
  double recall = 0.0;
  double precision = 0.0;  ///< NaN when the tracker reports nothing
};

/// CLEAR-MOT metrics. Per frame, correspondences from earlier frames are kept
/// while their IoU stays >= iou_match; remaining pairs are matched by the
/// Hungarian method on 1 - IoU among pairs with IoU >= iou_match. A match
/// whose tracker id differs from the last id matched to that object is an
/// identity switch. A fragmentation is a tracked -> untracked transition of an
/// object that is tracked again later. Throws UndefinedMetricError when the
/// ground truth is empty.
MotReport mot_metrics(std::span<const MotRecord> hypotheses, std::span<const MotRecord> truth,
                      double iou_match = 0.5);

/// key=value lines.
std::string format_mot_report(const MotReport& report);

}  // namespace pixelhand
