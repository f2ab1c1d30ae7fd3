#include "bitforensics/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "bitforensics/errors.hpp"
#include "bitforensics/io_ingest.hpp"
#include "bitforensics/ml_baseline.hpp"
#include "bitforensics/pipeline.hpp"
#include "bitforensics/report.hpp"

namespace bitforensics::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct InputOptions {
  std::vector<std::string> manifests;
  std::string dataset;
};

struct OutputOptions {
  std::string out;
  std::string format{"json"};
};

void add_inputs(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--manifest", in.manifests, "Bit manifest JSON (repeatable)")->check(CLI::ExistingFile);
  cmd->add_option("--dataset", in.dataset, "Directory of bit manifests")->check(CLI::ExistingDirectory);
}

void add_outputs(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_tau(CLI::App* cmd, AlignmentConfig& cfg) {
  cmd->add_option("--tau", cfg.tau, "Center-distance threshold for alignment (normalized units)")
      ->capture_default_str();
}

void add_rule_options(CLI::App* cmd, RuleConfig& r) {
  cmd->add_option("--green-fraction", r.green_fraction)->capture_default_str();
  cmd->add_option("--nose-missing-min", r.nose_missing_min)->capture_default_str();
  cmd->add_option("--shoulder-missing-min", r.shoulder_missing_min)->capture_default_str();
  cmd->add_option("--unmissing-max", r.unmissing_max)->capture_default_str();
  cmd->add_option("--coreout-missing-min", r.coreout_missing_min)->capture_default_str();
  cmd->add_option("--stickslip-core-count", r.stickslip_core_count)->capture_default_str();
  cmd->add_option("--heavy-damage-min", r.heavy_damage_min)->capture_default_str();
  cmd->add_option("--nose-shoulder-thermal-ratio", r.nose_shoulder_thermal_ratio)->capture_default_str();
  cmd->add_option("--shoulder-green-fraction", r.shoulder_green_fraction)->capture_default_str();
}

class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<BitManifest> collect_manifests(const InputOptions& in) {
  std::vector<BitManifest> out;
  if (!in.dataset.empty()) out = load_dataset(in.dataset);
  for (const auto& m : in.manifests) out.push_back(load_manifest(m));
  if (out.empty()) throw UsageError("no input: give --manifest or --dataset");
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.bit_id < b.bit_id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].bit_id == out[i - 1].bit_id) throw ManifestError("duplicate bit_id: " + out[i].bit_id);
  }
  return out;
}

std::vector<BitDetections> load_bits(const std::vector<BitManifest>& manifests) {
  return parallel_map(manifests.size(), [&](std::size_t i) { return load_bit(manifests[i]); });
}

void emit(const std::string& text, const OutputOptions& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
  }
}

json report_header(json config) { return {{"schema_version", kSchemaVersion}, {"config", std::move(config)}}; }

std::map<std::string, CauseLabels> labels_by_bit(const fs::path& path) {
  std::vector<CauseLabelRecord> records;
  try {
    records = parse_cause_labels(read_text_file(path));
  } catch (const ParseError& e) {
    throw e.with_file(path.string());
  }
  std::map<std::string, CauseLabels> out;
  for (auto& r : records) {
    if (!out.emplace(r.bit_id, std::move(r.causes)).second) {
      throw ParseError(0, "duplicate bit_id " + r.bit_id, path.string());
    }
  }
  return out;
}

/// Pairs predicted and true labels on the bits present in both files.
struct PairedLabels {
  std::vector<std::string> bit_ids;
  std::vector<CauseLabels> pred;
  std::vector<CauseLabels> truth;
};

PairedLabels pair_labels(const std::map<std::string, CauseLabels>& pred,
                         const std::map<std::string, CauseLabels>& truth) {
  PairedLabels p;
  for (const auto& [id, causes] : pred) {
    const auto it = truth.find(id);
    if (it == truth.end()) throw LengthMismatchError("bit " + id + " has no ground-truth labels");
    p.bit_ids.push_back(id);
    p.pred.push_back(causes);
    p.truth.push_back(it->second);
  }
  if (p.bit_ids.size() != truth.size()) throw LengthMismatchError("ground truth has bits without predictions");
  return p;
}

std::string labels_csv(const std::vector<std::string>& ids, const std::vector<CauseLabels>& causes,
                       const json& config) {
  std::vector<CauseLabelRecord> records;
  for (std::size_t i = 0; i < ids.size(); ++i) records.push_back({ids[i], causes[i]});
  return csv_preamble(config) + serialize_cause_labels(records);
}

ProfileSource parse_source(const std::string& s) {
  return s == "gt" ? ProfileSource::GroundTruth : ProfileSource::Detections;
}

FeatureVector features_for(const BitDetections& bit, const AlignmentConfig& cfg, ProfileSource source) {
  return build_features(summarize_bit(profile_bit(bit, cfg, source)));
}

// --- subcommands ---------------------------------------------------------------

struct AlignArgs {
  InputOptions in;
  OutputOptions out;
  AlignmentConfig tau;
};

int run_align(const AlignArgs& a, std::ostream& out) {
  if (!a.tau.valid()) throw UsageError("--tau must be positive and finite");
  const auto bits = load_bits(collect_manifests(a.in));
  const auto aligned = parallel_map(bits.size(), [&](std::size_t i) { return align_bit(bits[i], a.tau); });
  json report = report_header({{"alignment", to_json(a.tau)}});
  json arr = json::array();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    json images = json::array();
    for (const auto& img : aligned[i]) images.push_back(to_json(img));
    arr.push_back({{"bit_id", bits[i].bit_id}, {"images", std::move(images)}});
  }
  report["bits"] = std::move(arr);
  emit(report.dump(2) + "\n", a.out, out);
  return kExitOk;
}

struct DiagnoseArgs {
  InputOptions in;
  OutputOptions out;
  AlignmentConfig tau;
  RuleConfig rules;
  bool explain{false};
};

int run_diagnose(const DiagnoseArgs& a, std::ostream& out) {
  if (!a.tau.valid()) throw UsageError("--tau must be positive and finite");
  a.rules.validate();
  const auto bits = load_bits(collect_manifests(a.in));
  const auto results =
      parallel_map(bits.size(), [&](std::size_t i) { return diagnose_bit(bits[i], a.tau, a.rules); });
  const json config{{"alignment", to_json(a.tau)}, {"rules", to_json(a.rules)}};

  if (a.explain) {
    std::string text;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      text += fmt::format("bit {}\n{}\n", bits[i].bit_id, explain(results[i].result));
    }
    emit(text, a.out, out);
    return kExitOk;
  }
  if (a.out.format == "csv") {
    std::vector<std::string> ids;
    std::vector<CauseLabels> causes;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      ids.push_back(bits[i].bit_id);
      causes.push_back(results[i].result.causes);
    }
    emit(labels_csv(ids, causes, config), a.out, out);
    return kExitOk;
  }
  json report = report_header(config);
  json arr = json::array();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    json entry = cause_set_json(bits[i].bit_id, results[i].result);
    entry["profile"] = to_json(results[i].profile);
    arr.push_back(std::move(entry));
  }
  report["bits"] = std::move(arr);
  emit(report.dump(2) + "\n", a.out, out);
  return kExitOk;
}

struct FitArgs {
  InputOptions in;
  OutputOptions out;
  AlignmentConfig tau;
  std::string labels;
  std::string model{"dt"};
  std::string source{"detections"};
  std::uint64_t seed{0};
  int n_trees{100};
  std::optional<int> max_depth;
  int min_samples_split{2};
  bool loo{false};
};

int run_fit(const FitArgs& a, std::ostream& out) {
  if (!a.tau.valid()) throw UsageError("--tau must be positive and finite");
  if (a.n_trees < 1) throw UsageError("--n-trees must be at least 1");
  if (a.max_depth && *a.max_depth < 0) throw UsageError("--max-depth must be non-negative");
  if (a.min_samples_split < 2) throw UsageError("--min-samples-split must be at least 2");
  const auto bits = load_bits(collect_manifests(a.in));
  const auto truth = labels_by_bit(a.labels);
  const auto source = parse_source(a.source);

  std::vector<FeatureVector> X =
      parallel_map(bits.size(), [&](std::size_t i) { return features_for(bits[i], a.tau, source); });
  std::vector<LabelVector> Y;
  std::vector<std::string> ids;
  for (const auto& b : bits) {
    const auto it = truth.find(b.bit_id);
    if (it == truth.end()) throw LengthMismatchError("bit " + b.bit_id + " has no cause labels");
    Y.push_back(label_vector(it->second));
    ids.push_back(b.bit_id);
  }

  ForestParams params;
  params.n_trees = a.n_trees;
  params.seed = a.seed;
  params.tree.max_depth = a.max_depth;
  params.tree.min_samples_split = a.min_samples_split;
  const auto kind = a.model == "rf" ? ModelKind::RandomForest : ModelKind::DecisionTree;

  if (a.loo) {
    const auto preds = leave_one_out(X, Y, kind, params);
    json config{{"alignment", to_json(a.tau)},
                {"model", a.model},
                {"source", a.source},
                {"seed", a.seed},
                {"n_trees", a.n_trees},
                {"max_depth", a.max_depth ? json(*a.max_depth) : json(nullptr)},
                {"min_samples_split", a.min_samples_split},
                {"protocol", "leave_one_out"}};
    emit(labels_csv(ids, preds, config), a.out, out);
    return kExitOk;
  }
  std::string text = kind == ModelKind::RandomForest ? to_json(fit_forest(X, Y, params))
                                                     : to_json(fit_tree_model(X, Y, params.tree));
  emit(text + "\n", a.out, out);
  return kExitOk;
}

struct PredictArgs {
  InputOptions in;
  OutputOptions out;
  AlignmentConfig tau;
  std::string model;
  std::string source{"detections"};
};

int run_predict(const PredictArgs& a, std::ostream& out) {
  if (!a.tau.valid()) throw UsageError("--tau must be positive and finite");
  const auto model = model_from_json(read_text_file(a.model));
  const auto bits = load_bits(collect_manifests(a.in));
  const auto source = parse_source(a.source);
  const auto preds = parallel_map(bits.size(), [&](std::size_t i) {
    return model.predict(features_for(bits[i], a.tau, source));
  });
  std::vector<std::string> ids;
  for (const auto& b : bits) ids.push_back(b.bit_id);
  const json config{{"alignment", to_json(a.tau)}, {"model_file", a.model}, {"source", a.source}};
  if (a.out.format == "csv") {
    emit(labels_csv(ids, preds, config), a.out, out);
    return kExitOk;
  }
  json report = report_header(config);
  json arr = json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) arr.push_back({{"bit_id", ids[i]}, {"causes", causes_json(preds[i])}});
  report["bits"] = std::move(arr);
  emit(report.dump(2) + "\n", a.out, out);
  return kExitOk;
}

struct EvalDetArgs {
  InputOptions in;
  OutputOptions out;
  std::string stream{"damage"};
  double conf_thr{0.25};
  std::string ap_interp{"continuous"};
  bool confusion{false};
  double confusion_iou{0.5};
};

template <class ClassT>
std::vector<EvalImage> eval_images(const std::vector<BitDetections>& bits) {
  std::vector<EvalImage> out;
  for (const auto& b : bits) {
    std::vector<EvalImage> imgs;
    if constexpr (std::is_same_v<ClassT, LocationClass>) {
      imgs = make_eval_images<LocationClass>(b.location_images, b.gt_location_images);
    } else {
      imgs = make_eval_images<DamageClass>(b.damage_images, b.gt_damage_images);
    }
    out.insert(out.end(), std::make_move_iterator(imgs.begin()), std::make_move_iterator(imgs.end()));
  }
  return out;
}

int run_eval_det(const EvalDetArgs& a, std::ostream& out) {
  if (!(a.conf_thr >= 0.0 && a.conf_thr <= 1.0)) throw UsageError("--conf-thr must lie in [0, 1]");
  if (!(a.confusion_iou > 0.0 && a.confusion_iou <= 1.0)) throw UsageError("--confusion-iou must lie in (0, 1]");
  const auto bits = load_bits(collect_manifests(a.in));
  const bool location = a.stream == "location";
  const auto images = location ? eval_images<LocationClass>(bits) : eval_images<DamageClass>(bits);
  std::vector<std::string> names;
  if (location) {
    for (auto l : kAllLocations) names.emplace_back(code(l));
  } else {
    for (auto d : kAllDamages) names.emplace_back(code(d));
  }
  const auto interp = a.ap_interp == "11point" ? ApInterpolation::ElevenPoint : ApInterpolation::Continuous;
  const json config{{"stream", a.stream}, {"conf_thr", a.conf_thr}, {"ap_interp", a.ap_interp},
                    {"iou_thresholds", coco_thresholds()}};

  if (a.confusion) {
    const auto cm = detection_confusion(images, static_cast<int>(names.size()), a.confusion_iou);
    json cfg = config;
    cfg["confusion_iou"] = a.confusion_iou;
    if (a.out.format == "csv") {
      std::string text = csv_preamble(cfg) + "truth\\pred";
      for (const auto& n : names) text += "," + n;
      text += ",background\n";
      for (int t = 0; t <= cm.n_classes; ++t) {
        text += t < cm.n_classes ? names[t] : std::string("background");
        for (int p = 0; p <= cm.n_classes; ++p) text += fmt::format(",{}", cm.at(t, p));
        text += "\n";
      }
      emit(text, a.out, out);
    } else {
      json report = report_header(cfg);
      report["confusion"] = to_json(cm, names);
      emit(report.dump(2) + "\n", a.out, out);
    }
    return kExitOk;
  }
  const auto rows = detection_table(images, names, a.conf_thr, interp);
  if (a.out.format == "csv") {
    emit(csv_preamble(config) + detection_table_csv(rows), a.out, out);
  } else {
    json report = report_header(config);
    report["table"] = to_json(rows);
    emit(report.dump(2) + "\n", a.out, out);
  }
  return kExitOk;
}

struct EvalCauseArgs {
  OutputOptions out;
  std::string pred;
  std::string truth;
  bool include_stickslip{false};
};

int run_eval_cause(const EvalCauseArgs& a, std::ostream& out) {
  const auto p = pair_labels(labels_by_bit(a.pred), labels_by_bit(a.truth));
  const auto causes = default_evaluated_causes(a.include_stickslip);
  const auto report = multilabel_report(p.pred, p.truth, causes);
  const json config{{"include_stickslip", a.include_stickslip}, {"n_bits", p.bit_ids.size()}};
  if (a.out.format == "json") {
    json j = report_header(config);
    j["report"] = to_json(report);
    emit(j.dump(2) + "\n", a.out, out);
  } else {
    emit(csv_preamble(config) + multilabel_report_csv(report), a.out, out);
  }
  return kExitOk;
}

struct TallyArgs {
  InputOptions in;
  OutputOptions out;
  AlignmentConfig tau;
  RuleConfig rules;
  std::string pred;
  std::string truth;
};

int run_tally(const TallyArgs& a, std::ostream& out) {
  const auto truth = labels_by_bit(a.truth);
  std::map<std::string, CauseLabels> pred;
  json config;
  if (!a.pred.empty()) {
    if (!a.in.dataset.empty() || !a.in.manifests.empty()) {
      throw UsageError("give either --pred or --manifest/--dataset, not both");
    }
    pred = labels_by_bit(a.pred);
    config = {{"pred_file", a.pred}};
  } else {
    if (!a.tau.valid()) throw UsageError("--tau must be positive and finite");
    a.rules.validate();
    const auto bits = load_bits(collect_manifests(a.in));
    const auto results =
        parallel_map(bits.size(), [&](std::size_t i) { return diagnose_bit(bits[i], a.tau, a.rules).result; });
    for (std::size_t i = 0; i < bits.size(); ++i) pred[bits[i].bit_id] = results[i].causes;
    config = {{"alignment", to_json(a.tau)}, {"rules", to_json(a.rules)}};
  }
  const auto p = pair_labels(pred, truth);
  const auto tally = pipeline_tally(p.bit_ids, p.pred, p.truth);
  if (a.out.format == "csv") {
    emit(csv_preamble(config) + pipeline_tally_csv(tally), a.out, out);
  } else {
    json j = report_header(config);
    j["tally"] = to_json(tally);
    emit(j.dump(2) + "\n", a.out, out);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drill-bit damage forensics: alignment, rule-based cause identification, ML baselines, evaluation",
               "bitforensics"};
  app.require_subcommand(1, 1);

  AlignArgs align;
  auto* c_align = app.add_subcommand("align", "Dump aligned cutters per image");
  add_inputs(c_align, align.in);
  add_outputs(c_align, align.out);
  add_tau(c_align, align.tau);

  DiagnoseArgs diag;
  auto* c_diag = app.add_subcommand("diagnose", "Identify failure causes with the rule engine");
  add_inputs(c_diag, diag.in);
  add_outputs(c_diag, diag.out);
  add_tau(c_diag, diag.tau);
  add_rule_options(c_diag, diag.rules);
  c_diag->add_flag("--explain", diag.explain, "Print the human-readable rule trace");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit a decision tree or random forest baseline");
  add_inputs(c_fit, fit.in);
  add_outputs(c_fit, fit.out);
  add_tau(c_fit, fit.tau);
  c_fit->add_option("--labels", fit.labels, "Cause label CSV")->required()->check(CLI::ExistingFile);
  c_fit->add_option("--model", fit.model)->check(CLI::IsMember({"dt", "rf"}))->capture_default_str();
  c_fit->add_option("--source", fit.source)->check(CLI::IsMember({"detections", "gt"}))->capture_default_str();
  c_fit->add_option("--seed", fit.seed)->capture_default_str();
  c_fit->add_option("--n-trees", fit.n_trees)->capture_default_str();
  c_fit->add_option("--max-depth", fit.max_depth);
  c_fit->add_option("--min-samples-split", fit.min_samples_split)->capture_default_str();
  c_fit->add_flag("--loo", fit.loo, "Emit leave-one-out predictions instead of a model");

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "Predict causes with a saved model");
  add_inputs(c_pred, pred.in);
  add_outputs(c_pred, pred.out);
  add_tau(c_pred, pred.tau);
  c_pred->add_option("--model", pred.model, "Saved model JSON")->required()->check(CLI::ExistingFile);
  c_pred->add_option("--source", pred.source)->check(CLI::IsMember({"detections", "gt"}))->capture_default_str();

  EvalDetArgs edet;
  auto* c_edet = app.add_subcommand("eval-det", "Per-class detection metrics against ground truth");
  add_inputs(c_edet, edet.in);
  add_outputs(c_edet, edet.out);
  c_edet->add_option("--stream", edet.stream)->check(CLI::IsMember({"location", "damage"}))->capture_default_str();
  c_edet->add_option("--conf-thr", edet.conf_thr, "Confidence threshold for P and R")->capture_default_str();
  c_edet->add_option("--ap-interp", edet.ap_interp)
      ->check(CLI::IsMember({"continuous", "11point"}))
      ->capture_default_str();
  c_edet->add_flag("--confusion", edet.confusion, "Emit the class confusion matrix instead");
  c_edet->add_option("--confusion-iou", edet.confusion_iou)->capture_default_str();

  EvalCauseArgs ecause;
  ecause.out.format = "csv";
  auto* c_ecause = app.add_subcommand("eval-cause", "Multi-label cause metrics");
  add_outputs(c_ecause, ecause.out);
  c_ecause->add_option("--pred", ecause.pred)->required()->check(CLI::ExistingFile);
  c_ecause->add_option("--truth", ecause.truth)->required()->check(CLI::ExistingFile);
  c_ecause->add_flag("--include-stickslip", ecause.include_stickslip);

  TallyArgs tally;
  tally.out.format = "csv";
  auto* c_tally = app.add_subcommand("tally", "Per-bit existing/detected cause table");
  add_inputs(c_tally, tally.in);
  add_outputs(c_tally, tally.out);
  add_tau(c_tally, tally.tau);
  add_rule_options(c_tally, tally.rules);
  c_tally->add_option("--pred", tally.pred, "Predicted cause CSV")->check(CLI::ExistingFile);
  c_tally->add_option("--truth", tally.truth, "True cause CSV")->required()->check(CLI::ExistingFile);

  std::vector<const char*> argv{"bitforensics"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (c_align->parsed()) return run_align(align, out);
    if (c_diag->parsed()) return run_diagnose(diag, out);
    if (c_fit->parsed()) return run_fit(fit, out);
    if (c_pred->parsed()) return run_predict(pred, out);
    if (c_edet->parsed()) return run_eval_det(edet, out);
    if (c_ecause->parsed()) return run_eval_cause(ecause, out);
    if (c_tally->parsed()) return run_tally(tally, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace bitforensics::cli
