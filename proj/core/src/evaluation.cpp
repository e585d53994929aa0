#include "pixelhand/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>

#include "pixelhand/error.hpp"
#include "pixelhand/parallel.hpp"
#include "pixelhand/text_format.hpp"

namespace pixelhand {

namespace {

template <typename T, typename Score>
std::vector<std::size_t> by_score(std::span<const T> items, Score score) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score(items[a]) > score(items[b]);
  });
  return order;
}

std::vector<std::size_t> detection_order(std::span<const LabeledDetection> dets) {
  return by_score(dets, [](const LabeledDetection& d) { return d.score; });
}

}  // namespace

std::vector<LabeledDetection> match_detections(std::span<const RotatedBox> detections,
                                               std::span<const RotatedBox> truths,
                                               double iou_thresh, std::span<const bool> ignore) {
  if (!ignore.empty() && ignore.size() != truths.size()) {
    throw ConfigurationError("ignore flags must match the number of truths");
  }
  const auto is_ignored = [&](std::size_t t) { return !ignore.empty() && ignore[t]; };
  std::vector<LabeledDetection> labels(detections.size());
  std::vector<char> taken(truths.size(), 0);
  for (std::size_t d : by_score(detections, [](const RotatedBox& b) { return b.score; })) {
    labels[d].score = detections[d].score;
    double best = -1.0;
    std::size_t best_t = truths.size();
    bool hits_ignored = false;
    for (std::size_t t = 0; t < truths.size(); ++t) {
      const double iou = rotated_iou(detections[d], truths[t]);
      if (iou < iou_thresh) continue;
      if (is_ignored(t)) {
        hits_ignored = true;
      } else if (!taken[t] && iou > best) {
        best = iou;
        best_t = t;
      }
    }
    if (best_t < truths.size()) {
      taken[best_t] = 1;
      labels[d].label = MatchLabel::tp;
    } else {
      labels[d].label = hits_ignored ? MatchLabel::ignored : MatchLabel::fp;
    }
  }
  return labels;
}

namespace {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  double score = 0.0;
};

// Running TP/FP counts after each non-ignored detection, best score first.
std::vector<Counts> cumulative_counts(std::span<const LabeledDetection> detections) {
  std::vector<Counts> out;
  Counts c;
  for (std::size_t i : detection_order(detections)) {
    const auto& d = detections[i];
    if (d.label == MatchLabel::ignored) continue;
    (d.label == MatchLabel::tp ? c.tp : c.fp) += 1;
    c.score = d.score;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<PrPoint> pr_curve(std::span<const LabeledDetection> detections, std::size_t n_truths) {
  if (n_truths == 0) throw UndefinedMetricError("precision/recall need at least one truth");
  std::vector<PrPoint> points;
  for (const auto& c : cumulative_counts(detections)) {
    points.push_back({static_cast<double>(c.tp) / static_cast<double>(n_truths),
                      static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp), c.score});
  }
  return points;
}

double average_precision(std::span<const LabeledDetection> detections, std::size_t n_truths) {
  if (n_truths == 0) throw UndefinedMetricError("AP needs at least one truth");
  const auto counts = cumulative_counts(detections);
  // Integrate over TP increments so a perfect curve sums to exactly n_truths.
  double area = 0.0;
  double envelope = 0.0;
  for (std::size_t k = counts.size(); k-- > 0;) {
    const double precision =
        static_cast<double>(counts[k].tp) / static_cast<double>(counts[k].tp + counts[k].fp);
    envelope = std::max(envelope, precision);
    const std::size_t prev_tp = k == 0 ? 0 : counts[k - 1].tp;
    area += static_cast<double>(counts[k].tp - prev_tp) * envelope;
  }
  return area / static_cast<double>(n_truths);
}

std::array<FppiPoint, kFppiPoints> fppi_curve(std::span<const LabeledDetection> detections,
                                              std::size_t n_truths, std::size_t n_images) {
  if (n_images == 0) throw UndefinedMetricError("FPPI needs at least one image");
  if (n_truths == 0) throw UndefinedMetricError("recall needs at least one truth");
  std::array<FppiPoint, kFppiPoints> out{};
  for (std::size_t k = 0; k < kFppiPoints; ++k) {
    out[k].fppi = std::pow(10.0, -2.0 + 2.0 * static_cast<double>(k) / (kFppiPoints - 1));
  }
  const double images = static_cast<double>(n_images);
  const double truths = static_cast<double>(n_truths);
  std::size_t tp = 0, fp = 0;
  const auto record = [&] {
    const double fppi = static_cast<double>(fp) / images;
    const double recall = static_cast<double>(tp) / truths;
    for (auto& p : out) {
      if (fppi <= p.fppi) p.recall = std::max(p.recall, recall);
    }
  };
  record();
  for (std::size_t i : detection_order(detections)) {
    const auto& d = detections[i];
    if (d.label == MatchLabel::ignored) continue;
    (d.label == MatchLabel::tp ? tp : fp) += 1;
    record();
  }
  return out;
}

double average_recall(std::span<const LabeledDetection> detections, std::size_t n_truths,
                      std::size_t n_images) {
  const auto curve = fppi_curve(detections, n_truths, n_images);
  double sum = 0.0;
  for (const auto& p : curve) sum += p.recall;
  return sum / static_cast<double>(kFppiPoints);
}

double min_height(Level level) {
  switch (level) {
    case Level::level1:
      return 70.0;
    case Level::level2:
      return 25.0;
    case Level::all:
      break;
  }
  return 0.0;
}

Level parse_level(const std::string& text) {
  if (text == "1") return Level::level1;
  if (text == "2") return Level::level2;
  if (text == "all") return Level::all;
  throw ConfigurationError("level must be 1, 2 or all, got '" + text + "'");
}

std::string level_name(Level level) {
  switch (level) {
    case Level::level1:
      return "1";
    case Level::level2:
      return "2";
    case Level::all:
      break;
  }
  return "all";
}

std::vector<bool> level_ignore(std::span<const RotatedBox> truths, Level level) {
  const double h = min_height(level);
  std::vector<bool> ignore;
  ignore.reserve(truths.size());
  for (const auto& t : truths) ignore.push_back(t.hull().h < h);
  return ignore;
}

std::vector<RotatedBox> level_filter(std::span<const RotatedBox> truths, Level level) {
  const auto ignore = level_ignore(truths, level);
  std::vector<RotatedBox> kept;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (!ignore[i]) kept.push_back(truths[i]);
  }
  return kept;
}

EvalReport evaluate_detection(std::span<const std::vector<RotatedBox>> detections,
                              std::span<const std::vector<RotatedBox>> truths, Level level,
                              double iou_thresh) {
  if (detections.size() != truths.size()) {
    throw ConfigurationError("detections cover " + std::to_string(detections.size()) +
                             " images, truths cover " + std::to_string(truths.size()));
  }
  if (truths.empty()) throw UndefinedMetricError("evaluation needs at least one image");

  std::vector<std::vector<LabeledDetection>> per_image(truths.size());
  parallel_for(0, truths.size(), [&](std::size_t i) {
    const auto flags = level_ignore(truths[i], level);
    // std::vector<bool> has no contiguous storage.
    const std::unique_ptr<bool[]> ignore(new bool[flags.size()]);
    std::copy(flags.begin(), flags.end(), ignore.get());
    per_image[i] = match_detections(detections[i], truths[i], iou_thresh,
                                    std::span<const bool>(ignore.get(), flags.size()));
  });

  EvalReport rep;
  rep.level = level;
  rep.images = truths.size();
  for (const auto& t : truths) rep.truths += level_filter(t, level).size();
  if (rep.truths == 0) throw UndefinedMetricError("no ground truth left at level " + level_name(level));

  std::vector<LabeledDetection> pooled;
  for (const auto& image : per_image) pooled.insert(pooled.end(), image.begin(), image.end());
  rep.detections = pooled.size();
  for (const auto& d : pooled) {
    if (d.label == MatchLabel::tp) ++rep.tp;
    if (d.label == MatchLabel::fp) ++rep.fp;
    if (d.label == MatchLabel::ignored) ++rep.ignored;
  }
  rep.pr_points = pr_curve(pooled, rep.truths);
  rep.ap = average_precision(pooled, rep.truths);
  rep.fppi_points = fppi_curve(pooled, rep.truths, rep.images);
  rep.ar = average_recall(pooled, rep.truths, rep.images);
  return rep;
}

std::string format_eval_report(const EvalReport& r) {
  std::string text;
  text += "level=" + level_name(r.level) + "\n";
  text += "images=" + std::to_string(r.images) + "\n";
  text += "truths=" + std::to_string(r.truths) + "\n";
  text += "detections=" + std::to_string(r.detections) + "\n";
  text += "tp=" + std::to_string(r.tp) + "\n";
  text += "fp=" + std::to_string(r.fp) + "\n";
  text += "ignored=" + std::to_string(r.ignored) + "\n";
  text += "ap=" + format_double(r.ap) + "\n";
  text += "ar=" + format_double(r.ar) + "\n";
  for (std::size_t k = 0; k < r.fppi_points.size(); ++k) {
    const std::string key = "fppi" + std::to_string(k);
    text += key + ".fppi=" + format_double(r.fppi_points[k].fppi) + "\n";
    text += key + ".recall=" + format_double(r.fppi_points[k].recall) + "\n";
  }
  return text;
}

void write_pr_csv(std::ostream& out, const EvalReport& report) {
  out << "cutoff,recall,precision\n";
  for (const auto& p : report.pr_points) {
    out << format_double(p.cutoff) << ',' << format_double(p.recall) << ','
        << format_double(p.precision) << '\n';
  }
}

}  // namespace pixelhand
