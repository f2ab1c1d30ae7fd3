#include "bitforensics/rrfci.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bitforensics/errors.hpp"

namespace bitforensics {

namespace {

using L = LocationClass;
using D = DamageClass;

int heavy(const BitDamageProfile& p, LocationClass l) { return p.count(l, D::Missing); }
int thermal(const BitDamageProfile& p, LocationClass l) {
  return p.count(l, D::LowThermal) + p.count(l, D::MediumThermal);
}

/// Collects clause outcomes for one predicate and appends them to a trace.
class RuleRecorder {
 public:
  explicit RuleRecorder(std::string_view rule) { entry_.rule = rule; }

  bool clause(std::string_view text, bool holds) {
    if (holds) entry_.clauses.emplace_back(text);
    entry_.fired = entry_.fired || holds;
    return holds;
  }

  RuleRecorder& witness(std::string_view name, double value) {
    entry_.witness.push_back({std::string(name), value});
    return *this;
  }

  bool fired() const { return entry_.fired; }

  bool commit(Trace* trace) {
    if (trace) trace->push_back(entry_);
    return entry_.fired;
  }

 private:
  RuleTrace entry_;
};

}  // namespace

void RuleConfig::validate() const {
  auto fraction = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!fraction(green_fraction)) throw Error("green_fraction must lie in (0, 1]");
  if (!fraction(shoulder_green_fraction)) throw Error("shoulder_green_fraction must lie in (0, 1]");
  if (!(nose_shoulder_thermal_ratio > 1.0)) throw Error("nose_shoulder_thermal_ratio must exceed 1");
  if (nose_missing_min <= 0 || shoulder_missing_min <= 0 || unmissing_max <= 0 || coreout_missing_min <= 0 ||
      stickslip_core_count <= 0 || heavy_damage_min <= 0) {
    throw Error("rule count thresholds must be positive");
  }
}

WearPredicates wear_predicates(const BitDamageProfile& p, const RuleConfig& cfg, Trace* trace) {
  WearPredicates out;
  const int green = p.damage_total(D::Green);
  const int smooth = p.damage_total(D::SmoothWear);
  const int thermal_all = p.damage_total(D::LowThermal) + p.damage_total(D::MediumThermal);
  const int thermal_sh = thermal(p, L::Shoulder);
  const int blades = p.num_main_blades;

  RuleRecorder g("isGreen");
  g.clause("green cutters > green_fraction * total detected", green > cfg.green_fraction * p.total_detected);
  g.witness("green", green).witness("total_detected", p.total_detected).witness("green_fraction", cfg.green_fraction);
  out.is_green = g.commit(trace);

  RuleRecorder s("isSmoothWear");
  s.clause("smooth-wear cutters > thermal-wear cutters", smooth > thermal_all);
  s.witness("smooth", smooth).witness("thermal", thermal_all);
  out.is_smooth_wear = s.commit(trace);

  RuleRecorder t("isThermalWear");
  t.clause("thermal(Shoulder) > main blades", thermal_sh > blades);
  t.clause("thermal(all) > 2 * main blades", thermal_all > 2 * blades);
  t.witness("thermal_shoulder", thermal_sh).witness("thermal_total", thermal_all).witness("main_blades", blades);
  out.is_thermal_wear = t.commit(trace);
  return out;
}

RingoutPredicates ringout_predicates(const BitDamageProfile& p, const RuleConfig& cfg, Trace* trace) {
  RingoutPredicates out;
  const int h_core = heavy(p, L::Core);
  const int h_nose = heavy(p, L::Nose);
  const int h_sh = heavy(p, L::Shoulder);
  const int unmissing = p.total_detected - p.damage_total(D::Missing);
  const int shoulder_ro = p.count(L::ShoulderRO, D::ShoulderRODamage);

  RuleRecorder r("isRingout");
  r.clause("top view shows RO", p.top_ringout == TopRingout::RO);
  r.witness("top_ringout", p.top_ringout == TopRingout::RO ? 1 : 0);
  out.is_ringout = r.commit(trace);

  RuleRecorder c("isCoreout");
  c.clause("heavy(Core) > coreout_missing_min", h_core > cfg.coreout_missing_min);
  c.witness("heavy_core", h_core);
  out.is_coreout = c.commit(trace);

  RuleRecorder n("isNoseRingout");
  n.clause("heavy(Nose) > nose_missing_min", h_nose > cfg.nose_missing_min);
  n.clause("unmissing cutters < unmissing_max", unmissing < cfg.unmissing_max);
  n.clause("Shoulder_RO damage at Shoulder RO location", shoulder_ro >= 1);
  n.clause("ringout and heavy(Nose) > heavy(Shoulder) and not coreout and heavy(Nose) > heavy_damage_min",
           out.is_ringout && h_nose > h_sh && !out.is_coreout && h_nose > cfg.heavy_damage_min);
  n.witness("heavy_nose", h_nose)
      .witness("heavy_shoulder", h_sh)
      .witness("unmissing", unmissing)
      .witness("shoulder_ro", shoulder_ro);
  out.is_nose_ringout = n.commit(trace);

  RuleRecorder s("isShoulderRingout");
  s.clause("heavy(Shoulder) > shoulder_missing_min", h_sh > cfg.shoulder_missing_min);
  s.clause("Shoulder_RO damage at Shoulder RO location", shoulder_ro >= 1);
  s.clause("ringout and heavy(Shoulder) > heavy(Nose) and not coreout and heavy(Shoulder) > heavy_damage_min",
           out.is_ringout && h_sh > h_nose && !out.is_coreout && h_sh > cfg.heavy_damage_min);
  s.witness("heavy_shoulder", h_sh).witness("heavy_nose", h_nose).witness("shoulder_ro", shoulder_ro);
  out.is_shoulder_ringout = s.commit(trace);
  return out;
}

FracturePredicates fracture_predicates(const BitDamageProfile& p, const RuleConfig& cfg,
                                       const RingoutPredicates& ringouts, Trace* trace) {
  FracturePredicates out;
  const int h_core = heavy(p, L::Core);
  const int mth_core = p.count(L::Core, D::MediumThermal);
  const int heavy_all = p.damage_total(D::Missing);
  const int nf_all = p.damage_total(D::NormalFracture);
  const int mth_nose = p.count(L::Nose, D::MediumThermal);
  const int mth_sh = p.count(L::Shoulder, D::MediumThermal);
  const int sh_total = p.location_total(L::Shoulder);
  const int sh_green = p.count(L::Shoulder, D::Green);
  const double sh_green_frac = sh_total > 0 ? static_cast<double>(sh_green) / sh_total : 0.0;
  const int h_gauge = heavy(p, L::Gauge);
  const int h_sh = heavy(p, L::Shoulder);
  const int tf_nose = p.count(L::Nose, D::TangentialFracture) + p.count(L::Nose, D::GreenWithTFLine);
  const bool gate = !ringouts.is_nose_ringout && !ringouts.is_coreout;

  RuleRecorder ss("isStickSlip");
  ss.clause("heavy(Core) == stickslip_core_count and not nose ringout and not coreout",
            gate && h_core == cfg.stickslip_core_count);
  ss.clause("heavy(Core) + M_Th(Core) == stickslip_core_count and not nose ringout and not coreout",
            gate && h_core + mth_core == cfg.stickslip_core_count);
  ss.witness("heavy_core", h_core).witness("mth_core", mth_core);
  out.is_stickslip = ss.commit(trace);

  RuleRecorder ax("isAxial");
  ax.clause("H cutters present and not nose ringout and not coreout", gate && heavy_all >= 1);
  ax.clause("normal fracture present", nf_all >= 1);
  ax.clause("M_Th on Nose and Shoulder green fraction >= shoulder_green_fraction",
            mth_nose >= 1 && sh_total > 0 && sh_green_frac >= cfg.shoulder_green_fraction);
  ax.clause("M_Th(Nose) > ratio * M_Th(Shoulder)", mth_nose > cfg.nose_shoulder_thermal_ratio * mth_sh);
  ax.witness("heavy_total", heavy_all)
      .witness("nf_total", nf_all)
      .witness("mth_nose", mth_nose)
      .witness("mth_shoulder", mth_sh)
      .witness("shoulder_green_fraction", sh_green_frac);
  out.is_axial = ax.commit(trace);

  RuleRecorder wh("isWhirl");
  wh.clause("heavy(Gauge) present", h_gauge >= 1);
  wh.clause("heavy(Shoulder) present and not shoulder ringout", h_sh >= 1 && !ringouts.is_shoulder_ringout);
  wh.clause("tangential fracture on Nose", tf_nose >= 1);
  wh.witness("heavy_gauge", h_gauge).witness("heavy_shoulder", h_sh).witness("tf_nose", tf_nose);
  out.is_whirl = wh.commit(trace);
  return out;
}

CauseSet classify(const BitDamageProfile& profile, const RuleConfig& cfg) {
  cfg.validate();
  CauseSet out;
  const auto wear = wear_predicates(profile, cfg, &out.trace);
  const auto ring = ringout_predicates(profile, cfg, &out.trace);
  const auto frac = fracture_predicates(profile, cfg, ring, &out.trace);

  if (wear.is_green) {
    out.causes = {FailureCause::Green};
    return out;
  }
  auto set_if = [&](bool fired, FailureCause c) {
    if (fired) out.causes.insert(c);
  };
  set_if(wear.is_smooth_wear, FailureCause::SmoothWear);
  set_if(wear.is_thermal_wear, FailureCause::ThermalWear);
  set_if(ring.is_coreout, FailureCause::CoreOut);
  set_if(ring.is_nose_ringout, FailureCause::HardFormationTransition);
  set_if(ring.is_shoulder_ringout, FailureCause::SoftFormationTransition);
  set_if(frac.is_stickslip, FailureCause::StickSlip);
  set_if(frac.is_axial, FailureCause::Axial);
  set_if(frac.is_whirl, FailureCause::Whirl);
  return out;
}

std::string explain(const CauseSet& result) {
  std::string out;
  for (const auto& t : result.trace) {
    out += fmt::format("{:<18} {}", t.rule, t.fired ? "FIRED" : "-");
    std::string counts;
    for (const auto& w : t.witness) {
      if (!counts.empty()) counts += ", ";
      counts += w.value == std::floor(w.value) ? fmt::format("{}={}", w.name, static_cast<long long>(w.value))
                                               : fmt::format("{}={:.3f}", w.name, w.value);
    }
    out += "  [" + counts + "]\n";
    for (const auto& c : t.clauses) out += "    - " + c + "\n";
  }
  out += "causes:";
  if (result.causes.empty()) out += " (none)";
  for (auto c : result.causes) out += fmt::format(" {}", code(c));
  out += "\n";
  return out;
}

}  // namespace bitforensics
