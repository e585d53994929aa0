#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pixelhand/geometry.hpp"
#include "pixelhand/kalman.hpp"

namespace pixelhand {

/// One row of a MOT file. Frames are 1-based.
struct MotRecord {
  long frame = 0;
  long id = 0;
  AxisBox box;
  double score = 1.0;

  friend bool operator==(const MotRecord&, const MotRecord&) = default;
};

struct Detection {
  AxisBox box;
  double score = 1.0;
};

/// Axis-aligned hulls of rotated detections, keeping scores.
std::vector<Detection> to_detections(std::span<const RotatedBox> boxes);

enum class TrackState { tentative, confirmed, dead };

struct TrackPoint {
  long frame = 0;
  AxisBox box;
  double score = 1.0;
};

struct Track {
  long id = 0;
  std::vector<TrackPoint> points;  ///< strictly increasing frames
  TrackState state = TrackState::tentative;
};

struct SortOptions {
  double iou_gate = 0.3;
  int max_age = 1;
  int min_hits = 3;

  void validate() const;
};

/// A live track of the online tracker.
struct SortTrack {
  Track track;
  BoxKalman filter;
  int hits = 0;
  int hit_streak = 0;
  int age = 0;
  int time_since_update = 0;
};

/// Online SORT-style tracker: Kalman prediction, Hungarian assignment on IoU
/// gated at `iou_gate`, new tracks for unmatched detections, removal after
/// more than `max_age` frames without a match.
class SortTracker {
 public:
  explicit SortTracker(SortOptions options = {});

  /// Processes the next frame and returns the tracks reported for it: those
  /// updated this frame that have `min_hits` consecutive hits, or any updated
  /// track during the first `min_hits` frames. Boxes are the filter estimates.
  std::vector<MotRecord> step(std::span<const Detection> detections);

  const std::vector<SortTrack>& tracks() const { return tracks_; }
  /// Tracks removed so far, with state dead.
  const std::vector<Track>& finished() const { return finished_; }
  long frame() const { return frame_; }

  /// Detection index assigned to each live track in the last step, or -1.
  const std::vector<long>& last_assignment() const { return last_assignment_; }

 private:
  SortOptions options_;
  std::vector<SortTrack> tracks_;
  std::vector<Track> finished_;
  std::vector<long> last_assignment_;
  long frame_ = 0;
  long next_id_ = 1;
};

/// Runs the online tracker over a whole sequence (frame f holds detections of
/// frame f + 1) and returns all reported records.
std::vector<MotRecord> run_sort(std::span<const std::vector<Detection>> frames,
                                 const SortOptions& options = {});

struct IouTrackerOptions {
  double sigma_iou = 0.5;
  std::size_t min_track_len = 2;
};

/// Offline IOU tracker: each active track takes its highest-IoU detection in
/// the next frame if that IoU is at least sigma_iou, otherwise it ends. Left
/// over detections start new tracks. Tracks shorter than min_track_len are
/// dropped. Ids are assigned in order of track creation.
std::vector<Track> iou_track(std::span<const std::vector<Detection>> frames,
                             const IouTrackerOptions& options = {});

std::vector<MotRecord> to_records(std::span<const Track> tracks);

/// MOT records of ground-truth sequences: object k in frame f becomes id k + 1
/// at frame f + 1 with its axis-aligned hull.
std::vector<MotRecord> hull_records(std::span<const std::vector<RotatedBox>> frames);

}  // namespace pixelhand
