#pragma once
// Fuses the location stream and the damage stream of one image into
// located-damaged cutters.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitforensics/core_model.hpp"

namespace bitforensics {

struct AlignmentConfig {
  /// Strict upper bound on the center distance of a candidate damage box.
  double tau{0.05};

  bool valid() const { return tau > 0.0 && tau < 1.0; }
};

/// The damage detection chosen for a cutter.
struct DamageMatch {
  DamageClass damage{};
  double confidence{};
  double center_distance{};

  friend bool operator==(const DamageMatch&, const DamageMatch&) = default;
};

/// A cutter from the location stream with its damage, if one overlapped.
struct AlignedCutter {
  LocationClass location{};
  double location_confidence{};
  std::optional<DamageMatch> match;

  bool matched() const { return match.has_value(); }

  friend bool operator==(const AlignedCutter&, const AlignedCutter&) = default;
};

double center_distance(const BoundingBox& a, const BoundingBox& b);

/// One AlignedCutter per location detection, in input order. Each cutter takes
/// the highest-confidence damage detection whose center lies strictly closer
/// than `cfg.tau`; ties go to the smaller distance, then the smaller class
/// code. A damage detection may serve several cutters.
std::vector<AlignedCutter> align_image(std::span<const LocationDetection> locations,
                                       std::span<const DamageDetection> damages, const AlignmentConfig& cfg = {});

struct AlignedImage {
  std::string image_id;
  ImageView view;
  std::vector<AlignedCutter> cutters;
};

/// Aligns every paired image of a bit.
std::vector<AlignedImage> align_bit(const BitDetections& bit, const AlignmentConfig& cfg = {});

}  // namespace bitforensics
