#pragma once
// Per-bit damage profile and the main-damage importance policy.

#include <array>
#include <optional>
#include <span>
#include <string>

#include "bitforensics/alignment.hpp"
#include "bitforensics/core_model.hpp"

namespace bitforensics {

enum class TopRingout : std::uint8_t { RO, NoRO, Absent };

std::string_view code(TopRingout t);

using DamageCounts = std::array<int, kDamageCount>;

/// Location x damage tally for one bit.
///
/// Top-location detections describe the bit face rather than a cutter: they set
/// `top_ringout` and are not part of `counts`, `total_detected` or `unmatched`.
/// Invariant: sum(counts) + unmatched == total_detected.
struct BitDamageProfile {
  std::string bit_id;
  std::array<DamageCounts, kLocationCount> counts{};
  int total_detected{0};
  int unmatched{0};
  TopRingout top_ringout{TopRingout::Absent};
  int num_main_blades{kDefaultMainBlades};

  int count(LocationClass l, DamageClass d) const { return counts[index_of(l)][index_of(d)]; }
  int& count(LocationClass l, DamageClass d) { return counts[index_of(l)][index_of(d)]; }

  /// Matched cutters at one location.
  int location_total(LocationClass l) const;
  /// Cutters of one damage class over every location.
  int damage_total(DamageClass d) const;
  int matched_total() const;

  /// Adds `n` matched cutters and keeps total_detected consistent.
  void add(LocationClass l, DamageClass d, int n = 1);
  void add_unmatched(int n = 1);

  friend bool operator==(const BitDamageProfile&, const BitDamageProfile&) = default;
};

BitDamageProfile build_profile(std::span<const AlignedImage> aligned, const std::string& bit_id,
                               int num_main_blades = kDefaultMainBlades);

/// Importance rank of a damage: 1 fracture, 2 missing/ringout, 3 thermal,
/// 4 smooth wear, 5 green (no_ro included).
int damage_rank(DamageClass d);

/// Main damage of the cutters observed at one location.
///
/// The most important damage present wins, unless some non-green class holds
/// a strict majority of the non-green cutters, in which case that class wins.
/// Within a rank the higher count, then the smaller code, wins. Returns G_G
/// when only green cutters are present and nullopt for no cutters.
std::optional<DamageClass> main_damage(const DamageCounts& counts);
std::optional<DamageClass> main_damage(std::span<const DamageClass> damages);

/// Main damage per blade region (Core, Nose, Shoulder, Gauge).
struct MainDamageSummary {
  std::array<std::optional<DamageClass>, kBladeLocations.size()> main{};

  std::optional<DamageClass> at(LocationClass l) const;

  friend bool operator==(const MainDamageSummary&, const MainDamageSummary&) = default;
};

MainDamageSummary summarize_bit(const BitDamageProfile& profile);

}  // namespace bitforensics
