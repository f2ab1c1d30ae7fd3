#include "bitforensics/core_model.hpp"

#include <cmath>

#include "bitforensics/errors.hpp"

namespace bitforensics {

namespace {

constexpr std::array<std::string_view, kLocationCount> kLocationCodes{"C", "N", "Sh", "G", "top", "Shoulder RO"};

constexpr std::array<std::string_view, kDamageCount> kDamageCodes{
    "G_G", "L_Th", "M_Th", "H", "L_SW", "NF", "no_ro", "RO", "Shoulder_RO", "TF", "G_TF"};

constexpr std::array<std::string_view, kCauseCount> kCauseCodes{
    "smooth_wear", "thermal_wear", "core_out", "hard_ft", "soft_ft", "stick_slip", "axial", "whirl", "green"};

constexpr std::array<std::string_view, kCauseCount> kCauseNames{"Smooth Wear",
                                                                "Thermal Wear",
                                                                "Core Out",
                                                                "Hard Formation Transition",
                                                                "Soft Formation Transition",
                                                                "Stick-Slip",
                                                                "Axial",
                                                                "Whirl",
                                                                "Green"};

// Whitespace-free spelling of the "Shoulder RO" location, used by line files.
constexpr std::string_view kShoulderROLocationAlias = "Shoulder_RO";

template <std::size_t N>
std::string join_codes(const std::array<std::string_view, N>& codes) {
  std::string out;
  for (auto c : codes) {
    if (!out.empty()) out += ", ";
    out += c;
  }
  return out;
}

template <class ClassT, std::size_t N>
ClassT lookup(std::string_view code, const std::array<std::string_view, N>& codes, ClassKind kind) {
  for (std::size_t i = 0; i < N; ++i) {
    if (codes[i] == code) return static_cast<ClassT>(i);
  }
  throw UnknownClassError(std::string(code), std::string(kind_name(kind)), join_codes(codes));
}

}  // namespace

std::string_view code(LocationClass c) { return kLocationCodes[index_of(c)]; }
std::string_view code(DamageClass c) { return kDamageCodes[index_of(c)]; }
std::string_view code(FailureCause c) { return kCauseCodes[index_of(c)]; }
std::string_view display_name(FailureCause c) { return kCauseNames[index_of(c)]; }

DamageGroup damage_group(DamageClass c) {
  switch (c) {
    case DamageClass::NormalFracture:
    case DamageClass::TangentialFracture:
    case DamageClass::GreenWithTFLine:
      return DamageGroup::Fracture;
    case DamageClass::Missing:
    case DamageClass::RingoutTop:
    case DamageClass::ShoulderRODamage:
      return DamageGroup::Missing;
    case DamageClass::LowThermal:
    case DamageClass::MediumThermal:
      return DamageGroup::Thermal;
    case DamageClass::SmoothWear:
      return DamageGroup::Smooth;
    case DamageClass::Green:
    case DamageClass::NoRingoutTop:
      return DamageGroup::Green;
  }
  return DamageGroup::Green;
}

std::string_view kind_name(ClassKind k) {
  switch (k) {
    case ClassKind::Location:
      return "location";
    case ClassKind::Damage:
      return "damage";
    case ClassKind::Cause:
      return "cause";
  }
  return "?";
}

template <>
LocationClass parse_class<LocationClass>(std::string_view code) {
  if (code == kShoulderROLocationAlias) return LocationClass::ShoulderRO;
  return lookup<LocationClass>(code, kLocationCodes, ClassKind::Location);
}

template <>
DamageClass parse_class<DamageClass>(std::string_view code) {
  return lookup<DamageClass>(code, kDamageCodes, ClassKind::Damage);
}

template <>
FailureCause parse_class<FailureCause>(std::string_view code) {
  return lookup<FailureCause>(code, kCauseCodes, ClassKind::Cause);
}

bool BoundingBox::valid() const {
  auto finite = std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h);
  return finite && cx >= 0.0 && cx <= 1.0 && cy >= 0.0 && cy <= 1.0 && w > 0.0 && w <= 1.0 && h > 0.0 &&
         h <= 1.0;
}

BoundingBox BoundingBox::make(double cx, double cy, double w, double h) {
  BoundingBox b{cx, cy, w, h};
  if (!b.valid()) throw Error("bounding box out of range");
  return b;
}

}  // namespace bitforensics
