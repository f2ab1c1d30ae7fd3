#include "bitforensics/pipeline.hpp"

#include <cstdlib>
#include <string_view>

namespace bitforensics {

BitDamageProfile profile_bit(const BitDetections& bit, const AlignmentConfig& align_cfg, ProfileSource source) {
  if (source == ProfileSource::Detections) {
    const auto aligned = align_bit(bit, align_cfg);
    return build_profile(aligned, bit.bit_id, bit.num_main_blades);
  }
  BitDetections gt;
  gt.bit_id = bit.bit_id;
  gt.num_main_blades = bit.num_main_blades;
  gt.location_images = bit.gt_location_images;
  gt.damage_images = bit.gt_damage_images;
  const auto aligned = align_bit(gt, align_cfg);
  return build_profile(aligned, bit.bit_id, bit.num_main_blades);
}

BitDiagnosis diagnose_bit(const BitDetections& bit, const AlignmentConfig& align_cfg, const RuleConfig& rule_cfg) {
  BitDiagnosis d;
  d.profile = profile_bit(bit, align_cfg);
  d.result = classify(d.profile, rule_cfg);
  return d;
}

std::size_t worker_count() {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BITFORENSICS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return std::min(hw, static_cast<std::size_t>(v));
  }
  return hw;
}

}  // namespace bitforensics
