#include "pixelhand/mot_metrics.hpp"

#include <limits>
#include <map>
#include <set>
#include <vector>

#include "pixelhand/error.hpp"
#include "pixelhand/hungarian.hpp"
#include "pixelhand/text_format.hpp"

namespace pixelhand {

namespace {

using FrameBoxes = std::map<long, AxisBox>;  // id -> box

std::map<long, FrameBoxes> by_frame(std::span<const MotRecord> records, const char* what) {
  std::map<long, FrameBoxes> frames;
  for (const auto& r : records) {
    if (!frames[r.frame].emplace(r.id, r.box).second) {
      throw ConfigurationError(std::string(what) + ": id " + std::to_string(r.id) +
                               " appears twice in frame " + std::to_string(r.frame));
    }
  }
  return frames;
}

struct ObjectHistory {
  std::vector<char> tracked;  // one flag per frame the object is present
};

}  // namespace

MotReport mot_metrics(std::span<const MotRecord> hypotheses, std::span<const MotRecord> truth,
                      double iou_match) {
  if (truth.empty()) throw UndefinedMetricError("CLEAR-MOT metrics need non-empty ground truth");
  if (!(iou_match > 0.0 && iou_match <= 1.0)) {
    throw ConfigurationError("iou_match must lie in (0, 1]");
  }
  const auto gt_frames = by_frame(truth, "ground truth");
  const auto hyp_frames = by_frame(hypotheses, "tracker output");
  std::set<long> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : hyp_frames) frames.insert(f);

  MotReport rep;
  double iou_sum = 0.0;
  std::map<long, long> last_match;  // object -> last matched hypothesis
  std::map<long, ObjectHistory> history;
  const FrameBoxes empty;
  constexpr double kForbidden = 1e6;

  for (long f : frames) {
    const auto g_it = gt_frames.find(f);
    const auto h_it = hyp_frames.find(f);
    const FrameBoxes& gts = g_it == gt_frames.end() ? empty : g_it->second;
    const FrameBoxes& hyps = h_it == hyp_frames.end() ? empty : h_it->second;

    std::map<long, long> matched;  // object -> hypothesis
    std::set<long> used_hyp;
    for (const auto& [o, gbox] : gts) {
      const auto last = last_match.find(o);
      if (last == last_match.end()) continue;
      const auto h = hyps.find(last->second);
      if (h == hyps.end() || used_hyp.count(h->first)) continue;
      if (axis_iou(gbox, h->second) >= iou_match) {
        matched[o] = h->first;
        used_hyp.insert(h->first);
      }
    }

    std::vector<long> free_gt, free_hyp;
    for (const auto& [o, _] : gts) {
      if (!matched.count(o)) free_gt.push_back(o);
    }
    for (const auto& [h, _] : hyps) {
      if (!used_hyp.count(h)) free_hyp.push_back(h);
    }
    if (!free_gt.empty() && !free_hyp.empty()) {
      CostMatrix cost(free_gt.size(), free_hyp.size());
      for (std::size_t i = 0; i < free_gt.size(); ++i) {
        for (std::size_t j = 0; j < free_hyp.size(); ++j) {
          const double iou = axis_iou(gts.at(free_gt[i]), hyps.at(free_hyp[j]));
          cost(i, j) = iou >= iou_match ? 1.0 - iou : kForbidden;
        }
      }
      const auto assignment = solve_assignment(cost);
      for (std::size_t i = 0; i < free_gt.size(); ++i) {
        const long j = assignment[i];
        if (j == kUnassigned || cost(i, static_cast<std::size_t>(j)) >= kForbidden) continue;
        const long o = free_gt[i];
        const long h = free_hyp[static_cast<std::size_t>(j)];
        matched[o] = h;
        used_hyp.insert(h);
        const auto last = last_match.find(o);
        if (last != last_match.end() && last->second != h) ++rep.ids;
      }
    }

    for (const auto& [o, gbox] : gts) {
      const auto m = matched.find(o);
      const bool hit = m != matched.end();
      history[o].tracked.push_back(hit ? 1 : 0);
      if (hit) {
        iou_sum += axis_iou(gbox, hyps.at(m->second));
        last_match[o] = m->second;
      }
    }
    rep.gt += gts.size();
    rep.matches += matched.size();
    rep.fn += gts.size() - matched.size();
    rep.fp += hyps.size() - matched.size();
  }

  rep.gt_tracks = history.size();
  for (const auto& [o, hist] : history) {
    std::size_t hits = 0;
    for (char t : hist.tracked) hits += t ? 1 : 0;
    const double ratio = static_cast<double>(hits) / static_cast<double>(hist.tracked.size());
    if (ratio > 0.8) {
      ++rep.mt;
    } else if (ratio < 0.2) {
      ++rep.ml;
    } else {
      ++rep.pt;
    }
    std::size_t last_hit = 0;
    bool seen = false;
    for (std::size_t k = 0; k < hist.tracked.size(); ++k) {
      if (!hist.tracked[k]) continue;
      if (seen && k > last_hit + 1) ++rep.frag;
      seen = true;
      last_hit = k;
    }
  }

  const double gt = static_cast<double>(rep.gt);
  rep.mota = 1.0 - static_cast<double>(rep.fn + rep.fp + rep.ids) / gt;
  rep.recall = static_cast<double>(rep.matches) / gt;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  rep.motp = rep.matches > 0 ? iou_sum / static_cast<double>(rep.matches) : nan;
  rep.precision = rep.matches + rep.fp > 0
                      ? static_cast<double>(rep.matches) / static_cast<double>(rep.matches + rep.fp)
                      : nan;
  return rep;
}

std::string format_mot_report(const MotReport& r) {
  std::string text;
  const auto put = [&text](const char* key, const std::string& value) {
    text += key;
    text += '=';
    text += value;
    text += '\n';
  };
  put("mota", format_double(r.mota));
  put("motp", format_double(r.motp));
  put("recall", format_double(r.recall));
  put("precision", format_double(r.precision));
  put("mt", std::to_string(r.mt));
  put("pt", std::to_string(r.pt));
  put("ml", std::to_string(r.ml));
  put("gt_tracks", std::to_string(r.gt_tracks));
  put("ids", std::to_string(r.ids));
  put("frag", std::to_string(r.frag));
  put("fp", std::to_string(r.fp));
  put("fn", std::to_string(r.fn));
  put("gt", std::to_string(r.gt));
  put("matches", std::to_string(r.matches));
  return text;
}

}  // namespace pixelhand
