#pragma once
// Detection files, per-bit manifests and cause-label CSVs.
//
// Detection line format (one detection per line, '#' starts a comment):
//
//     <class> <cx> <cy> <w> <h> [<conf>]
//
// Coordinates are normalized center/size fractions. Ground-truth files use the
// same format without the confidence column. A file whose name ends in ".json"
// is read as an array of {"class", "cx", "cy", "w", "h", "conf"?} objects.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bitforensics/core_model.hpp"

namespace bitforensics {

/// Parses detection lines. Throws ParseError(line, reason) on a wrong field
/// count, a malformed or out-of-range number, or an unknown class code. When
/// `has_confidence` is false the confidence column must be absent and every
/// detection gets confidence 1.0.
template <class ClassT>
std::vector<Detection<ClassT>> parse_detection_lines(std::string_view text, bool has_confidence);

/// Inverse of parse_detection_lines, 6-decimal fixed notation.
template <class ClassT>
std::string serialize_detection_lines(std::span<const Detection<ClassT>> detections, bool with_confidence);

template <class ClassT>
std::vector<Detection<ClassT>> parse_detection_json(std::string_view text, bool has_confidence);

/// Reads a detection file in line or JSON form; parse errors carry the path.
template <class ClassT>
std::vector<Detection<ClassT>> read_detection_file(const std::filesystem::path& path, bool has_confidence);

struct ManifestEntry {
  std::string image_id;
  ImageView view;
  std::filesystem::path location_file;
  std::filesystem::path damage_file;
  std::optional<std::filesystem::path> gt_location_file;
  std::optional<std::filesystem::path> gt_damage_file;
};

struct BitManifest {
  std::string bit_id;
  int num_main_blades{kDefaultMainBlades};
  std::vector<ManifestEntry> entries;
};

/// Parses and validates a manifest document. Relative file paths are resolved
/// against `base_dir`. Throws ManifestError on schema violations, duplicate
/// image ids or more than one top view.
BitManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir = {});

BitManifest load_manifest(const std::filesystem::path& path);

/// Manifest JSON with paths written relative to `base_dir` where possible.
std::string manifest_to_json(const BitManifest& manifest, const std::filesystem::path& base_dir = {});

/// Loads every referenced file. Record count always equals the entry count; a
/// missing ground-truth file yields an empty ground-truth record.
BitDetections load_bit(const BitManifest& manifest);

/// All "*.json" manifests directly inside `dir`, ordered by file name.
std::vector<BitManifest> load_dataset(const std::filesystem::path& dir);

struct CauseLabelRecord {
  std::string bit_id;
  CauseLabels causes;

  friend bool operator==(const CauseLabelRecord&, const CauseLabelRecord&) = default;
};

inline constexpr std::string_view kCauseCsvHeader =
    "bit_id,smooth_wear,thermal_wear,core_out,hard_ft,soft_ft,stick_slip,axial,whirl,green";

/// Parses a cause-label CSV. Blank lines and lines starting with '#' are
/// ignored. Throws ParseError for a bad header or non-binary cell and
/// GreenConflictError when green is set together with another cause.
std::vector<CauseLabelRecord> parse_cause_labels(std::string_view text);

std::string serialize_cause_labels(std::span<const CauseLabelRecord> records);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace bitforensics
