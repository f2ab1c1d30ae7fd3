#include "bitforensics/report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace bitforensics {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fixed(double v) { return fmt::format("{:.4f}", v); }

std::string join_causes(const CauseLabels& causes) {
  std::string out;
  for (auto c : causes) {
    if (!out.empty()) out += ';';
    out += code(c);
  }
  return out;
}

}  // namespace

json to_json(const AlignmentConfig& cfg) { return {{"tau", cfg.tau}}; }

json to_json(const RuleConfig& cfg) {
  return {{"green_fraction", cfg.green_fraction},
          {"nose_missing_min", cfg.nose_missing_min},
          {"shoulder_missing_min", cfg.shoulder_missing_min},
          {"unmissing_max", cfg.unmissing_max},
          {"coreout_missing_min", cfg.coreout_missing_min},
          {"stickslip_core_count", cfg.stickslip_core_count},
          {"heavy_damage_min", cfg.heavy_damage_min},
          {"nose_shoulder_thermal_ratio", cfg.nose_shoulder_thermal_ratio},
          {"shoulder_green_fraction", cfg.shoulder_green_fraction}};
}

json to_json(const AlignedCutter& cutter) {
  json j{{"location", std::string(code(cutter.location))}, {"location_conf", cutter.location_confidence}};
  if (cutter.match) {
    j["damage"] = std::string(code(cutter.match->damage));
    j["damage_conf"] = cutter.match->confidence;
    j["center_distance"] = cutter.match->center_distance;
  } else {
    j["damage"] = "Unmatched";
    j["damage_conf"] = nullptr;
    j["center_distance"] = nullptr;
  }
  return j;
}

json to_json(const AlignedImage& image) {
  json cutters = json::array();
  for (const auto& c : image.cutters) cutters.push_back(to_json(c));
  json j{{"image_id", image.image_id}, {"view", image.view.kind == ViewKind::Top ? "top" : "side"}};
  if (image.view.kind == ViewKind::Side) j["side_index"] = image.view.side_index;
  j["cutters"] = std::move(cutters);
  return j;
}

json to_json(const BitDamageProfile& profile) {
  json counts = json::object();
  for (auto l : kAllLocations) {
    for (auto d : kAllDamages) {
      if (const int n = profile.count(l, d); n > 0) counts[fmt::format("{}/{}", code(l), code(d))] = n;
    }
  }
  return {{"counts", std::move(counts)},
          {"unmatched", profile.unmatched},
          {"total_detected", profile.total_detected},
          {"top_ringout", std::string(code(profile.top_ringout))},
          {"num_main_blades", profile.num_main_blades}};
}

json to_json(const MainDamageSummary& summary) {
  json j = json::object();
  for (auto l : kBladeLocations) {
    const auto d = summary.at(l);
    j[std::string(code(l))] = d ? json(std::string(code(*d))) : json(nullptr);
  }
  return j;
}

json to_json(const RuleTrace& trace) {
  json witness = json::object();
  for (const auto& w : trace.witness) {
    if (w.value == std::floor(w.value) && std::abs(w.value) < 1e15) {
      witness[w.name] = static_cast<long long>(w.value);
    } else {
      witness[w.name] = w.value;
    }
  }
  return {{"rule", trace.rule}, {"fired", trace.fired}, {"clauses", trace.clauses}, {"witness", std::move(witness)}};
}

json causes_json(const CauseLabels& causes) {
  json arr = json::array();
  for (auto c : causes) arr.push_back(std::string(code(c)));
  return arr;
}

json cause_set_json(const std::string& bit_id, const CauseSet& result) {
  json trace = json::array();
  for (const auto& t : result.trace) trace.push_back(to_json(t));
  return {{"bit_id", bit_id}, {"causes", causes_json(result.causes)}, {"trace", std::move(trace)}};
}

json to_json(const MultiLabelReport& report) {
  json causes = json::array();
  for (const auto& m : report.per_cause) {
    causes.push_back({{"cause", std::string(code(m.cause))},
                      {"tp", m.confusion.tp},
                      {"fp", m.confusion.fp},
                      {"fn", m.confusion.fn},
                      {"tn", m.confusion.tn},
                      {"accuracy", m.accuracy},
                      {"precision", m.precision},
                      {"recall", m.recall},
                      {"f1", optional_number(m.f1)}});
  }
  return {{"per_cause", std::move(causes)},
          {"macro_average",
           {{"accuracy", report.macro_accuracy},
            {"precision", report.macro_precision},
            {"recall", report.macro_recall},
            {"f1", optional_number(report.macro_f1)}}}};
}

json to_json(const PipelineTally& tally) {
  json rows = json::array();
  for (const auto& r : tally.rows) {
    rows.push_back({{"bit_id", r.bit_id},
                    {"existing", causes_json(r.existing)},
                    {"detected", causes_json(r.detected)},
                    {"correct", r.correct},
                    {"false", r.falsely}});
  }
  return {{"rows", std::move(rows)},
          {"total_existing", tally.total_existing},
          {"correctly_detected", tally.correctly_detected},
          {"falsely_detected", tally.falsely_detected}};
}

json to_json(std::span<const DetectionTableRow> rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"class", r.label},
                   {"labels", r.n_labels},
                   {"P", r.precision},
                   {"R", r.recall},
                   {"mAP@.5", optional_number(r.map50)},
                   {"mAP@.5:.95", optional_number(r.map50_95)}});
  }
  return arr;
}

json to_json(const ConfusionMatrix& cm, std::span<const std::string> class_names) {
  json labels = json::array();
  for (const auto& n : class_names) labels.push_back(n);
  labels.push_back("background");
  return {{"labels", std::move(labels)}, {"rows_are", "truth"}, {"cells", cm.cells}};
}

std::string csv_preamble(const json& config) {
  return fmt::format("# schema_version: {}\n# config: {}\n", kSchemaVersion, config.dump());
}

std::string multilabel_report_csv(const MultiLabelReport& report) {
  std::string out = "metric";
  for (const auto& m : report.per_cause) out += fmt::format(",{}", display_name(m.cause));
  out += ",macro-Average\n";
  auto row = [&](std::string_view name, auto&& value, const std::string& macro) {
    out += name;
    for (const auto& m : report.per_cause) out += "," + value(m);
    out += "," + macro + "\n";
  };
  row("Accuracy", [](const CauseMetrics& m) { return fixed(m.accuracy); }, fixed(report.macro_accuracy));
  row("Precision", [](const CauseMetrics& m) { return fixed(m.precision); }, fixed(report.macro_precision));
  row("Recall", [](const CauseMetrics& m) { return fixed(m.recall); }, fixed(report.macro_recall));
  row("F1 score", [](const CauseMetrics& m) { return m.f1 ? fixed(*m.f1) : std::string("-"); },
      report.macro_f1 ? fixed(*report.macro_f1) : std::string("-"));
  return out;
}

std::string detection_table_csv(std::span<const DetectionTableRow> rows) {
  std::string out = "Class,Labels,P,R,mAP@.5,mAP@.5:.95\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string("-"); };
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.3f},{:.3f},{},{}\n", r.label, r.n_labels, r.precision, r.recall, opt(r.map50),
                       opt(r.map50_95));
  }
  return out;
}

std::string pipeline_tally_csv(const PipelineTally& tally) {
  std::string out = "bit_id,existing,detected,correct,false\n";
  for (const auto& r : tally.rows) {
    out += fmt::format("{},{},{},{},{}\n", r.bit_id, join_causes(r.existing), join_causes(r.detected), r.correct,
                       r.falsely);
  }
  out += fmt::format("Total,{},,{},{}\n", tally.total_existing, tally.correctly_detected, tally.falsely_detected);
  return out;
}

}  // namespace bitforensics
