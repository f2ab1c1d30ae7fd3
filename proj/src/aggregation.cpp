#include "bitforensics/aggregation.hpp"

#include <numeric>

#include "bitforensics/errors.hpp"

namespace bitforensics {

std::string_view code(TopRingout t) {
  switch (t) {
    case TopRingout::RO:
      return "RO";
    case TopRingout::NoRO:
      return "no_ro";
    case TopRingout::Absent:
      return "absent";
  }
  return "absent";
}

int BitDamageProfile::location_total(LocationClass l) const {
  const auto& row = counts[index_of(l)];
  return std::accumulate(row.begin(), row.end(), 0);
}

int BitDamageProfile::damage_total(DamageClass d) const {
  int n = 0;
  for (const auto& row : counts) n += row[index_of(d)];
  return n;
}

int BitDamageProfile::matched_total() const {
  int n = 0;
  for (auto l : kAllLocations) n += location_total(l);
  return n;
}

void BitDamageProfile::add(LocationClass l, DamageClass d, int n) {
  if (l == LocationClass::Top) throw Error("top-view detections are not cutters");
  count(l, d) += n;
  total_detected += n;
}

void BitDamageProfile::add_unmatched(int n) {
  unmatched += n;
  total_detected += n;
}

BitDamageProfile build_profile(std::span<const AlignedImage> aligned, const std::string& bit_id,
                               int num_main_blades) {
  BitDamageProfile p;
  p.bit_id = bit_id;
  p.num_main_blades = num_main_blades;
  for (const auto& image : aligned) {
    for (const auto& cutter : image.cutters) {
      if (cutter.location == LocationClass::Top) {
        if (!cutter.match) continue;
        if (cutter.match->damage == DamageClass::RingoutTop) {
          p.top_ringout = TopRingout::RO;
        } else if (p.top_ringout == TopRingout::Absent) {
          p.top_ringout = TopRingout::NoRO;
        }
        continue;
      }
      if (cutter.match) {
        p.add(cutter.location, cutter.match->damage);
      } else {
        p.add_unmatched();
      }
    }
  }
  return p;
}

int damage_rank(DamageClass d) { return static_cast<int>(damage_group(d)) + 1; }

std::optional<DamageClass> main_damage(const DamageCounts& counts) {
  int total = 0;
  int non_green = 0;
  for (auto d : kAllDamages) {
    total += counts[index_of(d)];
    if (damage_group(d) != DamageGroup::Green) non_green += counts[index_of(d)];
  }
  if (total == 0) return std::nullopt;
  if (non_green == 0) return DamageClass::Green;

  for (auto d : kAllDamages) {
    if (damage_group(d) != DamageGroup::Green && 2 * counts[index_of(d)] > non_green) return d;
  }

  std::optional<DamageClass> best;
  for (auto d : kAllDamages) {
    const int n = counts[index_of(d)];
    if (n == 0 || damage_group(d) == DamageGroup::Green) continue;
    if (!best) {
      best = d;
      continue;
    }
    const int rd = damage_rank(d);
    const int rb = damage_rank(*best);
    const int nb = counts[index_of(*best)];
    if (rd < rb || (rd == rb && (n > nb || (n == nb && code(d) < code(*best))))) best = d;
  }
  return best;
}

std::optional<DamageClass> main_damage(std::span<const DamageClass> damages) {
  DamageCounts counts{};
  for (auto d : damages) ++counts[index_of(d)];
  return main_damage(counts);
}

std::optional<DamageClass> MainDamageSummary::at(LocationClass l) const {
  for (std::size_t i = 0; i < kBladeLocations.size(); ++i) {
    if (kBladeLocations[i] == l) return main[i];
  }
  return std::nullopt;
}

MainDamageSummary summarize_bit(const BitDamageProfile& profile) {
  MainDamageSummary s;
  for (std::size_t i = 0; i < kBladeLocations.size(); ++i) {
    s.main[i] = main_damage(profile.counts[index_of(kBladeLocations[i])]);
  }
  return s;
}

}  // namespace bitforensics
