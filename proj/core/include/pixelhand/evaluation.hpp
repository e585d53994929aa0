#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pixelhand/geometry.hpp"

namespace pixelhand {

enum class MatchLabel { tp, fp, ignored };

struct LabeledDetection {
  double score = 0.0;
  MatchLabel label = MatchLabel::fp;
};

/// Greedy matching in descending score order (ties by input order). Each
/// detection takes the highest-IoU unmatched truth with IoU >= iou_thresh and
/// becomes a TP; failing that, a detection overlapping an ignored truth by
/// iou_thresh is labelled ignored, otherwise FP. `ignore` is empty or holds one
/// flag per truth. Labels are returned in input order.
std::vector<LabeledDetection> match_detections(std::span<const RotatedBox> detections,
                                               std::span<const RotatedBox> truths,
                                               double iou_thresh = 0.5,
                                               std::span<const bool> ignore = {});

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double cutoff = 0.0;
};

/// Precision and recall after each detection in descending score order;
/// ignored detections are skipped.
std::vector<PrPoint> pr_curve(std::span<const LabeledDetection> detections, std::size_t n_truths);

/// All-points interpolated AP: the precision envelope (max precision at any
/// recall >= r) integrated over recall. Throws UndefinedMetricError for zero
/// truths.
double average_precision(std::span<const LabeledDetection> detections, std::size_t n_truths);

inline constexpr std::size_t kFppiPoints = 9;

struct FppiPoint {
  double fppi = 0.0;
  double recall = 0.0;
};

/// Recall at fppi = 10^-2 ... 10^0 (nine log-spaced points): for each point,
/// the largest recall reached by a score cutoff whose false positives per
/// image do not exceed it.
std::array<FppiPoint, kFppiPoints> fppi_curve(std::span<const LabeledDetection> detections,
                                              std::size_t n_truths, std::size_t n_images);

/// Mean recall over the nine FPPI points. `detections` pools every image.
double average_recall(std::span<const LabeledDetection> detections, std::size_t n_truths,
                      std::size_t n_images);

enum class Level { all, level1, level2 };

/// Minimum axis-aligned height of a truth at `level`: 70 px for Level-1,
/// 25 px for Level-2, 0 for all.
double min_height(Level level);
Level parse_level(const std::string& text);
std::string level_name(Level level);

/// Truths whose axis-aligned hull is at least min_height(level) tall.
std::vector<RotatedBox> level_filter(std::span<const RotatedBox> truths, Level level);
/// Ignore flag per truth: true when it falls below the level threshold.
std::vector<bool> level_ignore(std::span<const RotatedBox> truths, Level level);

struct EvalReport {
  Level level = Level::all;
  std::size_t images = 0;
  std::size_t truths = 0;  ///< truths kept by the level filter
  std::size_t detections = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t ignored = 0;
  std::vector<PrPoint> pr_points;
  std::array<FppiPoint, kFppiPoints> fppi_points{};
  double ap = 0.0;
  double ar = 0.0;
};

/// Evaluates per-image detections against per-image truths. Throws
/// UndefinedMetricError for zero images or zero kept truths and
/// ConfigurationError when the image counts differ.
EvalReport evaluate_detection(std::span<const std::vector<RotatedBox>> detections,
                              std::span<const std::vector<RotatedBox>> truths, Level level,
                              double iou_thresh = 0.5);

/// key=value lines.
std::string format_eval_report(const EvalReport& report);
/// `cutoff,recall,precision` with a header line.
void write_pr_csv(std::ostream& out, const EvalReport& report);

}  // namespace pixelhand
