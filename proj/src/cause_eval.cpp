#include "bitforensics/cause_eval.hpp"

#include "bitforensics/errors.hpp"

namespace bitforensics {

std::vector<FailureCause> default_evaluated_causes(bool include_stickslip) {
  std::vector<FailureCause> out;
  for (std::size_t i = 0; i < kDiagnosableCauseCount; ++i) {
    const auto c = kAllCauses[i];
    if (c == FailureCause::StickSlip && !include_stickslip) continue;
    out.push_back(c);
  }
  return out;
}

MultiLabelReport multilabel_report(std::span<const CauseLabels> pred, std::span<const CauseLabels> truth,
                                   std::span<const FailureCause> included) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw LengthMismatchError("prediction and truth lists must be nonempty and of equal length");
  }
  MultiLabelReport r;
  r.included.assign(included.begin(), included.end());
  const double n = static_cast<double>(pred.size());
  double f1_sum = 0.0;
  int f1_count = 0;
  for (auto cause : included) {
    CauseMetrics m;
    m.cause = cause;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const bool p = pred[i].contains(cause);
      const bool t = truth[i].contains(cause);
      auto& c = m.confusion;
      (p ? (t ? c.tp : c.fp) : (t ? c.fn : c.tn)) += 1;
    }
    const auto& c = m.confusion;
    m.accuracy = (c.tp + c.tn) / n;
    m.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    if (m.precision + m.recall > 0.0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
      f1_sum += *m.f1;
      ++f1_count;
    }
    r.macro_accuracy += m.accuracy;
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.per_cause.push_back(m);
  }
  if (!included.empty()) {
    const double k = static_cast<double>(included.size());
    r.macro_accuracy /= k;
    r.macro_precision /= k;
    r.macro_recall /= k;
  }
  if (f1_count > 0) r.macro_f1 = f1_sum / f1_count;
  return r;
}

PipelineTally pipeline_tally(std::span<const std::string> bit_ids, std::span<const CauseLabels> pred,
                             std::span<const CauseLabels> truth) {
  if (pred.size() != truth.size() || bit_ids.size() != truth.size()) {
    throw LengthMismatchError("tally inputs must be aligned bit lists");
  }
  PipelineTally t;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    TallyRow row;
    row.bit_id = bit_ids[i];
    row.existing = truth[i];
    row.detected = pred[i];
    for (auto c : pred[i]) {
      if (c == FailureCause::Green) continue;
      (truth[i].contains(c) ? row.correct : row.falsely) += 1;
    }
    for (auto c : truth[i]) t.total_existing += c == FailureCause::Green ? 0 : 1;
    t.correctly_detected += row.correct;
    t.falsely_detected += row.falsely;
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace bitforensics
