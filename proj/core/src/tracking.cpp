#include "pixelhand/tracking.hpp"

#include <algorithm>

#include "pixelhand/error.hpp"
#include "pixelhand/hungarian.hpp"

namespace pixelhand {

std::vector<Detection> to_detections(std::span<const RotatedBox> boxes) {
  std::vector<Detection> out;
  out.reserve(boxes.size());
  for (const auto& b : boxes) out.push_back({b.hull(), b.score});
  return out;
}

void SortOptions::validate() const {
  if (!(iou_gate >= 0.0 && iou_gate <= 1.0)) throw ConfigurationError("iou_gate must lie in [0, 1]");
  if (max_age < 0) throw ConfigurationError("max_age must be >= 0");
  if (min_hits < 0) throw ConfigurationError("min_hits must be >= 0");
}

SortTracker::SortTracker(SortOptions options) : options_(options) { options_.validate(); }

std::vector<MotRecord> SortTracker::step(std::span<const Detection> detections) {
  ++frame_;
  std::vector<Detection> dets;
  for (const auto& d : detections) {
    if (d.box.w > 0.0 && d.box.h > 0.0) dets.push_back(d);
  }

  std::vector<AxisBox> predicted;
  predicted.reserve(tracks_.size());
  for (auto& t : tracks_) {
    predicted.push_back(t.filter.predict());
    ++t.age;
    if (t.time_since_update > 0) t.hit_streak = 0;
    ++t.time_since_update;
  }

  std::vector<long> det_of_track(tracks_.size(), -1);
  std::vector<char> det_used(dets.size(), 0);
  if (!tracks_.empty() && !dets.empty()) {
    CostMatrix cost(tracks_.size(), dets.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      for (std::size_t j = 0; j < dets.size(); ++j) cost(i, j) = -axis_iou(predicted[i], dets[j].box);
    }
    const auto assignment = solve_assignment(cost);
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      const long j = assignment[i];
      if (j == kUnassigned || -cost(i, static_cast<std::size_t>(j)) < options_.iou_gate) continue;
      det_of_track[i] = j;
      det_used[static_cast<std::size_t>(j)] = 1;
    }
  }

  std::vector<MotRecord> reported;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    auto& t = tracks_[i];
    if (det_of_track[i] < 0) continue;
    const Detection& d = dets[static_cast<std::size_t>(det_of_track[i])];
    t.filter.update(d.box);
    t.time_since_update = 0;
    ++t.hits;
    ++t.hit_streak;
    t.track.points.push_back({frame_, t.filter.box(), d.score});
  }
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (det_used[j]) continue;
    SortTrack t{Track{next_id_++, {}, TrackState::tentative}, BoxKalman(dets[j].box), 0, 0, 0, 0};
    t.track.points.push_back({frame_, dets[j].box, dets[j].score});
    tracks_.push_back(std::move(t));
    det_of_track.push_back(static_cast<long>(j));
  }

  for (auto& t : tracks_) {
    if (t.time_since_update == 0 &&
        (t.hit_streak >= options_.min_hits || frame_ <= options_.min_hits)) {
      reported.push_back({frame_, t.track.id, t.filter.box(), t.track.points.back().score});
    }
    if (t.hits >= options_.min_hits) t.track.state = TrackState::confirmed;
  }

  std::vector<SortTrack> alive;
  std::vector<long> assignment;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    auto& t = tracks_[i];
    if (t.time_since_update > options_.max_age) {
      t.track.state = TrackState::dead;
      finished_.push_back(std::move(t.track));
    } else {
      alive.push_back(std::move(t));
      assignment.push_back(det_of_track[i]);
    }
  }
  tracks_ = std::move(alive);
  last_assignment_ = std::move(assignment);
  std::sort(reported.begin(), reported.end(),
            [](const MotRecord& a, const MotRecord& b) { return a.id < b.id; });
  return reported;
}

std::vector<MotRecord> run_sort(std::span<const std::vector<Detection>> frames,
                                const SortOptions& options) {
  SortTracker tracker(options);
  std::vector<MotRecord> out;
  for (const auto& dets : frames) {
    const auto step = tracker.step(dets);
    out.insert(out.end(), step.begin(), step.end());
  }
  return out;
}

std::vector<Track> iou_track(std::span<const std::vector<Detection>> frames,
                             const IouTrackerOptions& options) {
  if (!(options.sigma_iou >= 0.0 && options.sigma_iou <= 1.0)) {
    throw ConfigurationError("sigma_iou must lie in [0, 1]");
  }
  std::vector<Track> active;
  std::vector<Track> done;
  long next_id = 1;
  const auto finish = [&](Track&& t) {
    if (t.points.size() >= options.min_track_len) {
      t.state = TrackState::dead;
      done.push_back(std::move(t));
    }
  };

  for (std::size_t f = 0; f < frames.size(); ++f) {
    const long frame = static_cast<long>(f) + 1;
    std::vector<Detection> dets = frames[f];
    std::vector<Track> updated;
    for (auto& t : active) {
      if (!dets.empty()) {
        std::size_t best = 0;
        double best_iou = -1.0;
        for (std::size_t j = 0; j < dets.size(); ++j) {
          const double iou = axis_iou(t.points.back().box, dets[j].box);
          if (iou > best_iou) {
            best_iou = iou;
            best = j;
          }
        }
        if (best_iou >= options.sigma_iou) {
          t.points.push_back({frame, dets[best].box, dets[best].score});
          dets.erase(dets.begin() + static_cast<std::ptrdiff_t>(best));
          updated.push_back(std::move(t));
          continue;
        }
      }
      finish(std::move(t));
    }
    for (const auto& d : dets) {
      updated.push_back(Track{next_id++, {{frame, d.box, d.score}}, TrackState::tentative});
    }
    active = std::move(updated);
  }
  for (auto& t : active) finish(std::move(t));

  std::sort(done.begin(), done.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
  return done;
}

std::vector<MotRecord> to_records(std::span<const Track> tracks) {
  std::vector<MotRecord> out;
  for (const auto& t : tracks) {
    for (const auto& p : t.points) out.push_back({p.frame, t.id, p.box, p.score});
  }
  std::stable_sort(out.begin(), out.end(), [](const MotRecord& a, const MotRecord& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return out;
}

std::vector<MotRecord> hull_records(std::span<const std::vector<RotatedBox>> frames) {
  std::vector<MotRecord> out;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t k = 0; k < frames[f].size(); ++k) {
      out.push_back({static_cast<long>(f) + 1, static_cast<long>(k) + 1, frames[f][k].hull(),
                     frames[f][k].score});
    }
  }
  return out;
}

}  // namespace pixelhand
