#include "bitforensics/alignment.hpp"

#include <cmath>

#include "bitforensics/errors.hpp"

namespace bitforensics {

double center_distance(const BoundingBox& a, const BoundingBox& b) { return std::hypot(a.cx - b.cx, a.cy - b.cy); }

namespace {

// True when candidate `c` should replace the current best `b`.
bool better(const DamageMatch& c, const DamageMatch& b) {
  if (c.confidence != b.confidence) return c.confidence > b.confidence;
  if (c.center_distance != b.center_distance) return c.center_distance < b.center_distance;
  return code(c.damage) < code(b.damage);
}

}  // namespace

std::vector<AlignedCutter> align_image(std::span<const LocationDetection> locations,
                                       std::span<const DamageDetection> damages, const AlignmentConfig& cfg) {
  if (!cfg.valid()) throw Error("alignment tau must lie in (0, 1)");
  std::vector<AlignedCutter> out;
  out.reserve(locations.size());
  for (const auto& loc : locations) {
    AlignedCutter cutter{loc.label, loc.confidence, std::nullopt};
    for (const auto& dmg : damages) {
      const double d = center_distance(loc.box, dmg.box);
      if (!(d < cfg.tau)) continue;
      DamageMatch candidate{dmg.label, dmg.confidence, d};
      if (!cutter.match || better(candidate, *cutter.match)) cutter.match = candidate;
    }
    out.push_back(cutter);
  }
  return out;
}

std::vector<AlignedImage> align_bit(const BitDetections& bit, const AlignmentConfig& cfg) {
  if (bit.location_images.size() != bit.damage_images.size()) {
    throw Error("bit '" + bit.bit_id + "': location and damage image lists differ in length");
  }
  std::vector<AlignedImage> out;
  out.reserve(bit.location_images.size());
  for (std::size_t i = 0; i < bit.location_images.size(); ++i) {
    const auto& loc = bit.location_images[i];
    const auto& dmg = bit.damage_images[i];
    if (loc.image_id != dmg.image_id) {
      throw Error("bit '" + bit.bit_id + "': image '" + loc.image_id + "' has no paired damage record");
    }
    out.push_back({loc.image_id, loc.view, align_image(loc.detections, dmg.detections, cfg)});
  }
  return out;
}

}  // namespace bitforensics
