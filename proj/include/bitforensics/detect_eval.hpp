#pragma once
// Object-detection metrics: IoU, greedy one-to-one matching, average
// precision, mAP at one IoU threshold and averaged over 0.50:0.05:0.95, and a
// detection confusion matrix.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitforensics/core_model.hpp"

namespace bitforensics {

double iou(const BoundingBox& a, const BoundingBox& b);

struct Prediction {
  BoundingBox box;
  double confidence{};
};

/// Outcome of matching one image's predictions of one class to its ground truth.
struct MatchResult {
  std::vector<int> pred_to_gt;  // per input prediction: matched GT index, or -1 (false positive)
  std::vector<bool> gt_matched;
  double iou_threshold{0.5};

  int true_positives() const;
  int false_positives() const;
  int false_negatives() const;
};

/// Predictions are visited by descending confidence (input order on ties);
/// each claims the unclaimed ground truth with the highest IoU >= thr (lowest
/// index on ties), otherwise it is a false positive.
MatchResult match(std::span<const Prediction> preds, std::span<const BoundingBox> gts, double thr);

struct ScoredMatch {
  double confidence{};
  bool true_positive{false};
};

/// All matches of one class across a dataset.
struct ClassMatches {
  std::vector<ScoredMatch> matches;
  int n_gt{0};
};

enum class ApInterpolation : std::uint8_t { Continuous, ElevenPoint };

struct PRPoint {
  double recall{};
  double precision{};
};

struct APResult {
  int cls{-1};
  std::optional<double> ap;  // nullopt when the class has neither GT nor predictions
  std::vector<PRPoint> curve;
  int n_gt{0};
  int n_pred{0};
};

/// Area under the monotone precision envelope of the PR curve ranked by
/// confidence. No GT and no predictions: skipped; no GT with predictions: 0.
APResult average_precision(const ClassMatches& matches, ApInterpolation interp = ApInterpolation::Continuous);

struct LabeledPrediction {
  BoundingBox box;
  int cls{};
  double confidence{};
};

struct LabeledBox {
  BoundingBox box;
  int cls{};
};

struct EvalImage {
  std::vector<LabeledPrediction> preds;
  std::vector<LabeledBox> gts;
};

/// Builds evaluation images from paired prediction/ground-truth records.
template <class ClassT>
std::vector<EvalImage> make_eval_images(std::span<const ImageRecord<ClassT>> preds,
                                        std::span<const ImageRecord<ClassT>> gts) {
  std::vector<EvalImage> out(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (const auto& d : preds[i].detections) {
      out[i].preds.push_back({d.box, static_cast<int>(index_of(d.label)), d.confidence});
    }
    if (i < gts.size()) {
      for (const auto& g : gts[i].detections) out[i].gts.push_back({g.box, static_cast<int>(index_of(g.label))});
    }
  }
  return out;
}

/// Per-class matches over a dataset at one IoU threshold.
ClassMatches collect_matches(std::span<const EvalImage> images, int cls, double thr);

struct MAPResult {
  std::vector<APResult> per_class;  // one per class id
  double map{0.0};
  int n{0};                         // classes with ground truth
};

/// Mean AP over classes that have ground truth. Throws NoGroundTruthError
/// when no class has any.
MAPResult map_at(std::span<const EvalImage> images, int n_classes, double thr,
                 ApInterpolation interp = ApInterpolation::Continuous);

/// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_thresholds();

/// map_at averaged over coco_thresholds(); per-class APs are averaged too.
MAPResult map_range(std::span<const EvalImage> images, int n_classes,
                    ApInterpolation interp = ApInterpolation::Continuous);

/// Square matrix indexed [truth][predicted] over the classes plus a
/// background slot at index n_classes. Boxes are matched class-agnostically.
struct ConfusionMatrix {
  int n_classes{0};
  std::vector<std::vector<int>> cells;

  int background() const { return n_classes; }
  int at(int truth, int predicted) const { return cells[truth][predicted]; }
};

ConfusionMatrix detection_confusion(std::span<const EvalImage> images, int n_classes, double thr);

/// One row of the per-class detection table (precision and recall at a
/// confidence threshold and IoU 0.5).
struct DetectionTableRow {
  std::string label;
  int n_labels{0};
  double precision{0.0};
  double recall{0.0};
  std::optional<double> map50;
  std::optional<double> map50_95;
};

/// "all" row first, then one row per class with ground truth or predictions.
std::vector<DetectionTableRow> detection_table(std::span<const EvalImage> images,
                                               std::span<const std::string> class_names, double conf_thr,
                                               ApInterpolation interp = ApInterpolation::Continuous);

}  // namespace bitforensics
