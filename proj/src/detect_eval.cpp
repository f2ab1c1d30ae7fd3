#include "bitforensics/detect_eval.hpp"

#include <algorithm>
#include <numeric>

#include "bitforensics/errors.hpp"

namespace bitforensics {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  // Areas from the same corner arithmetic as the intersection, so iou(a, a) is exactly 1.
  const double area_a = (a.x2() - a.x1()) * (a.y2() - a.y1());
  const double area_b = (b.x2() - b.x1()) * (b.y2() - b.y1());
  const double inter = iw * ih;
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? std::min(1.0, inter / uni) : 0.0;
}

int MatchResult::true_positives() const {
  return static_cast<int>(std::count_if(pred_to_gt.begin(), pred_to_gt.end(), [](int g) { return g >= 0; }));
}

int MatchResult::false_positives() const { return static_cast<int>(pred_to_gt.size()) - true_positives(); }

int MatchResult::false_negatives() const {
  return static_cast<int>(std::count(gt_matched.begin(), gt_matched.end(), false));
}

namespace {

std::vector<std::size_t> by_confidence(std::size_t n, auto&& confidence_of) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return confidence_of(a) > confidence_of(b); });
  return order;
}

}  // namespace

MatchResult match(std::span<const Prediction> preds, std::span<const BoundingBox> gts, double thr) {
  MatchResult r;
  r.iou_threshold = thr;
  r.pred_to_gt.assign(preds.size(), -1);
  r.gt_matched.assign(gts.size(), false);
  for (auto p : by_confidence(preds.size(), [&](std::size_t i) { return preds[i].confidence; })) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (r.gt_matched[g]) continue;
      const double v = iou(preds[p].box, gts[g]);
      if (v >= thr && (best < 0 || v > best_iou)) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      r.pred_to_gt[p] = best;
      r.gt_matched[best] = true;
    }
  }
  return r;
}

APResult average_precision(const ClassMatches& cm, ApInterpolation interp) {
  APResult out;
  out.n_gt = cm.n_gt;
  out.n_pred = static_cast<int>(cm.matches.size());
  if (cm.n_gt == 0) {
    if (!cm.matches.empty()) out.ap = 0.0;
    return out;
  }
  const auto order = by_confidence(cm.matches.size(), [&](std::size_t i) { return cm.matches[i].confidence; });
  int tp = 0;
  int fp = 0;
  for (auto i : order) {
    (cm.matches[i].true_positive ? tp : fp) += 1;
    out.curve.push_back({static_cast<double>(tp) / cm.n_gt, static_cast<double>(tp) / (tp + fp)});
  }

  // Monotone (non-increasing in recall) precision envelope.
  std::vector<double> envelope(out.curve.size());
  double running = 0.0;
  for (std::size_t k = out.curve.size(); k-- > 0;) {
    running = std::max(running, out.curve[k].precision);
    envelope[k] = running;
  }

  double ap = 0.0;
  if (interp == ApInterpolation::Continuous) {
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < out.curve.size(); ++k) {
      ap += (out.curve[k].recall - prev_recall) * envelope[k];
      prev_recall = out.curve[k].recall;
    }
  } else {
    for (int t = 0; t <= 10; ++t) {
      const double level = t / 10.0;
      double best = 0.0;
      for (std::size_t k = 0; k < out.curve.size(); ++k) {
        if (out.curve[k].recall >= level) best = std::max(best, out.curve[k].precision);
      }
      ap += best / 11.0;
    }
  }
  out.ap = ap;
  return out;
}

ClassMatches collect_matches(std::span<const EvalImage> images, int cls, double thr) {
  ClassMatches cm;
  for (const auto& img : images) {
    std::vector<Prediction> preds;
    std::vector<BoundingBox> gts;
    for (const auto& p : img.preds) {
      if (p.cls == cls) preds.push_back({p.box, p.confidence});
    }
    for (const auto& g : img.gts) {
      if (g.cls == cls) gts.push_back(g.box);
    }
    const auto r = match(preds, gts, thr);
    for (std::size_t i = 0; i < preds.size(); ++i) cm.matches.push_back({preds[i].confidence, r.pred_to_gt[i] >= 0});
    cm.n_gt += static_cast<int>(gts.size());
  }
  return cm;
}

MAPResult map_at(std::span<const EvalImage> images, int n_classes, double thr, ApInterpolation interp) {
  MAPResult out;
  double sum = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    auto ap = average_precision(collect_matches(images, c, thr), interp);
    ap.cls = c;
    if (ap.n_gt > 0) {
      sum += *ap.ap;
      ++out.n;
    }
    out.per_class.push_back(std::move(ap));
  }
  if (out.n == 0) throw NoGroundTruthError("no class has ground-truth boxes");
  out.map = sum / out.n;
  return out;
}

std::vector<double> coco_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.50 + 0.05 * i);
  return t;
}

MAPResult map_range(std::span<const EvalImage> images, int n_classes, ApInterpolation interp) {
  const auto thresholds = coco_thresholds();
  MAPResult out;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    auto at = map_at(images, n_classes, thresholds[k], interp);
    if (k == 0) {
      out = at;
      for (auto& ap : out.per_class) {
        ap.curve.clear();
        if (ap.ap) *ap.ap /= static_cast<double>(thresholds.size());
      }
      out.map = at.map / static_cast<double>(thresholds.size());
      continue;
    }
    for (int c = 0; c < n_classes; ++c) {
      if (at.per_class[c].ap) *out.per_class[c].ap += *at.per_class[c].ap / static_cast<double>(thresholds.size());
    }
    out.map += at.map / static_cast<double>(thresholds.size());
  }
  return out;
}

ConfusionMatrix detection_confusion(std::span<const EvalImage> images, int n_classes, double thr) {
  ConfusionMatrix cm;
  cm.n_classes = n_classes;
  cm.cells.assign(n_classes + 1, std::vector<int>(n_classes + 1, 0));
  for (const auto& img : images) {
    std::vector<Prediction> preds;
    std::vector<BoundingBox> gts;
    for (const auto& p : img.preds) preds.push_back({p.box, p.confidence});
    for (const auto& g : img.gts) gts.push_back(g.box);
    const auto r = match(preds, gts, thr);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const int truth = r.pred_to_gt[i] >= 0 ? img.gts[r.pred_to_gt[i]].cls : cm.background();
      ++cm.cells[truth][img.preds[i].cls];
    }
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!r.gt_matched[g]) ++cm.cells[img.gts[g].cls][cm.background()];
    }
  }
  return cm;
}

std::vector<DetectionTableRow> detection_table(std::span<const EvalImage> images,
                                               std::span<const std::string> class_names, double conf_thr,
                                               ApInterpolation interp) {
  const int n_classes = static_cast<int>(class_names.size());
  const auto at50 = map_at(images, n_classes, 0.5, interp);
  const auto range = map_range(images, n_classes, interp);

  std::vector<EvalImage> confident(images.begin(), images.end());
  for (auto& img : confident) {
    std::erase_if(img.preds, [&](const LabeledPrediction& p) { return p.confidence < conf_thr; });
  }

  std::vector<DetectionTableRow> rows;
  DetectionTableRow all{"all", 0, 0.0, 0.0, at50.map, range.map};
  int with_gt = 0;
  for (int c = 0; c < n_classes; ++c) {
    const auto& ap = at50.per_class[c];
    if (ap.n_gt == 0 && ap.n_pred == 0) continue;
    const auto cm = collect_matches(confident, c, 0.5);
    int tp = 0;
    for (const auto& m : cm.matches) tp += m.true_positive ? 1 : 0;
    DetectionTableRow row;
    row.label = class_names[c];
    row.n_labels = cm.n_gt;
    row.precision = cm.matches.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(cm.matches.size());
    row.recall = cm.n_gt == 0 ? 0.0 : static_cast<double>(tp) / cm.n_gt;
    row.map50 = ap.ap;
    row.map50_95 = range.per_class[c].ap;
    if (cm.n_gt > 0) {
      all.n_labels += cm.n_gt;
      all.precision += row.precision;
      all.recall += row.recall;
      ++with_gt;
    }
    rows.push_back(std::move(row));
  }
  if (with_gt > 0) {
    all.precision /= with_gt;
    all.recall /= with_gt;
  }
  rows.insert(rows.begin(), all);
  return rows;
}

}  // namespace bitforensics
