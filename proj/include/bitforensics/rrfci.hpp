#pragma once
// Rule-based failure cause identification over a bit damage profile.
//
// Counting shorthand used throughout:
//   cnt(L, D)   cutters at location L matched to damage D
//   heavy(L)    cnt(L, H), the missing / heavily damaged cutters
//   thermal(L)  cnt(L, L_Th) + cnt(L, M_Th)
//   B           number of main blades

#include <string>
#include <string_view>
#include <vector>

#include "bitforensics/aggregation.hpp"
#include "bitforensics/core_model.hpp"

namespace bitforensics {

/// Rule thresholds. Defaults are the literal values of the original rules.
struct RuleConfig {
  double green_fraction{0.80};
  int nose_missing_min{5};
  int shoulder_missing_min{5};
  int unmissing_max{10};
  int coreout_missing_min{1};
  int stickslip_core_count{2};
  int heavy_damage_min{2};
  double nose_shoulder_thermal_ratio{1.5};
  double shoulder_green_fraction{0.75};

  /// Throws Error when a threshold is out of range.
  void validate() const;
};

struct Witness {
  std::string name;
  double value{};
};

/// One evaluated predicate: whether it fired, which clauses held and the
/// counts it looked at.
struct RuleTrace {
  std::string rule;
  bool fired{false};
  std::vector<std::string> clauses;
  std::vector<Witness> witness;
};

using Trace = std::vector<RuleTrace>;

struct WearPredicates {
  bool is_green{false};
  bool is_smooth_wear{false};
  bool is_thermal_wear{false};
};

struct RingoutPredicates {
  bool is_ringout{false};
  bool is_coreout{false};
  bool is_nose_ringout{false};
  bool is_shoulder_ringout{false};
};

struct FracturePredicates {
  bool is_stickslip{false};
  bool is_axial{false};
  bool is_whirl{false};
};

/// Predicate names, in evaluation order.
inline constexpr std::string_view kRuleNames[] = {"isGreen",   "isSmoothWear",     "isThermalWear",
                                                  "isRingout", "isCoreout",        "isNoseRingout",
                                                  "isShoulderRingout", "isStickSlip", "isAxial",
                                                  "isWhirl"};

WearPredicates wear_predicates(const BitDamageProfile& p, const RuleConfig& cfg = {}, Trace* trace = nullptr);
RingoutPredicates ringout_predicates(const BitDamageProfile& p, const RuleConfig& cfg = {},
                                     Trace* trace = nullptr);
FracturePredicates fracture_predicates(const BitDamageProfile& p, const RuleConfig& cfg,
                                       const RingoutPredicates& ringouts, Trace* trace = nullptr);

/// Multi-label diagnosis plus the firing trace of every predicate.
/// Invariant: Green present implies it is the only cause.
struct CauseSet {
  CauseLabels causes;
  Trace trace;

  bool contains(FailureCause c) const { return causes.contains(c); }
};

/// Evaluates every predicate and maps the fired ones to causes. When isGreen
/// fires the result is {Green} alone; the trace still lists all predicates.
CauseSet classify(const BitDamageProfile& profile, const RuleConfig& cfg = {});

/// Multi-line, human-readable rendering of a trace.
std::string explain(const CauseSet& result);

}  // namespace bitforensics
