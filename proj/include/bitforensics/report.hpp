#pragma once
// JSON and CSV renderings of pipeline results. Every top-level report carries
// a schema_version and the effective configuration.

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bitforensics/aggregation.hpp"
#include "bitforensics/alignment.hpp"
#include "bitforensics/cause_eval.hpp"
#include "bitforensics/detect_eval.hpp"
#include "bitforensics/rrfci.hpp"

namespace bitforensics {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const AlignmentConfig& cfg);
nlohmann::json to_json(const RuleConfig& cfg);
nlohmann::json to_json(const AlignedCutter& cutter);
nlohmann::json to_json(const AlignedImage& image);

/// {"counts": {"N/G_G": 9, ...}, "unmatched": k, "top_ringout": "RO"|"no_ro"|"absent", ...}
nlohmann::json to_json(const BitDamageProfile& profile);
nlohmann::json to_json(const MainDamageSummary& summary);
nlohmann::json to_json(const RuleTrace& trace);

/// {"bit_id": ..., "causes": [...], "trace": [...]}
nlohmann::json cause_set_json(const std::string& bit_id, const CauseSet& result);

nlohmann::json causes_json(const CauseLabels& causes);

nlohmann::json to_json(const MultiLabelReport& report);
nlohmann::json to_json(const PipelineTally& tally);
nlohmann::json to_json(std::span<const DetectionTableRow> rows);
nlohmann::json to_json(const ConfusionMatrix& cm, std::span<const std::string> class_names);

/// Comment preamble for CSV reports: schema version and effective config.
std::string csv_preamble(const nlohmann::json& config);

/// Rows: Accuracy, Precision, Recall, F1 score; columns: causes then macro-Average.
std::string multilabel_report_csv(const MultiLabelReport& report);
std::string detection_table_csv(std::span<const DetectionTableRow> rows);
std::string pipeline_tally_csv(const PipelineTally& tally);

}  // namespace bitforensics
