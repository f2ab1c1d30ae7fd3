#pragma once
// Multi-label failure-cause metrics and the complete-pipeline tally.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitforensics/core_model.hpp"

namespace bitforensics {

struct BinaryConfusion {
  int tp{0};
  int fp{0};
  int fn{0};
  int tn{0};
};

struct CauseMetrics {
  FailureCause cause{};
  BinaryConfusion confusion;
  double accuracy{0.0};
  double precision{0.0};  // 0 when nothing was predicted
  double recall{0.0};     // 0 when nothing is true
  std::optional<double> f1;  // undefined when precision + recall == 0
};

struct MultiLabelReport {
  std::vector<CauseMetrics> per_cause;
  std::vector<FailureCause> included;
  // Unweighted means over the included causes; F1 skips undefined values.
  double macro_accuracy{0.0};
  double macro_precision{0.0};
  double macro_recall{0.0};
  std::optional<double> macro_f1;
};

/// Diagnosable causes evaluated by default: everything except Green and StickSlip.
std::vector<FailureCause> default_evaluated_causes(bool include_stickslip = false);

/// Per-cause binary confusion over bits. Throws LengthMismatchError when the
/// lists differ in length or are empty.
MultiLabelReport multilabel_report(std::span<const CauseLabels> pred, std::span<const CauseLabels> truth,
                                   std::span<const FailureCause> included);

struct TallyRow {
  std::string bit_id;
  CauseLabels existing;
  CauseLabels detected;
  int correct{0};
  int falsely{0};
};

struct PipelineTally {
  std::vector<TallyRow> rows;
  int total_existing{0};
  int correctly_detected{0};
  int falsely_detected{0};
};

/// Green is the empty-set sentinel and never counts as a detected cause.
PipelineTally pipeline_tally(std::span<const std::string> bit_ids, std::span<const CauseLabels> pred,
                             std::span<const CauseLabels> truth);

}  // namespace bitforensics
