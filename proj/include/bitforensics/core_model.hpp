#pragma once
// Shared vocabulary: class taxonomies, normalized boxes, detections and
// per-bit image records.

#include <array>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bitforensics {

// ---------------------------------------------------------------------------
// Taxonomies
// ---------------------------------------------------------------------------

/// Radial position of a cutter on the blade, as labeled by the location detector.
enum class LocationClass : std::uint8_t { Core, Nose, Shoulder, Gauge, Top, ShoulderRO };

/// Cutter condition, as labeled by the damage detector.
enum class DamageClass : std::uint8_t {
  Green,
  LowThermal,
  MediumThermal,
  Missing,
  SmoothWear,
  NormalFracture,
  NoRingoutTop,
  RingoutTop,
  ShoulderRODamage,
  TangentialFracture,
  GreenWithTFLine,
};

/// Bit failure cause. The first eight are the diagnosable causes; Green marks
/// a bit with (almost) no damage and never co-occurs with another cause.
enum class FailureCause : std::uint8_t {
  SmoothWear,
  ThermalWear,
  CoreOut,
  HardFormationTransition,
  SoftFormationTransition,
  StickSlip,
  Axial,
  Whirl,
  Green,
};

inline constexpr std::size_t kLocationCount = 6;
inline constexpr std::size_t kDamageCount = 11;
inline constexpr std::size_t kCauseCount = 9;
inline constexpr std::size_t kDiagnosableCauseCount = 8;

inline constexpr std::array<LocationClass, kLocationCount> kAllLocations{
    LocationClass::Core, LocationClass::Nose,  LocationClass::Shoulder,
    LocationClass::Gauge, LocationClass::Top, LocationClass::ShoulderRO};

/// The four blade regions that carry a main damage and feed the ML features.
inline constexpr std::array<LocationClass, 4> kBladeLocations{
    LocationClass::Core, LocationClass::Nose, LocationClass::Shoulder, LocationClass::Gauge};

inline constexpr std::array<DamageClass, kDamageCount> kAllDamages{
    DamageClass::Green,          DamageClass::LowThermal,       DamageClass::MediumThermal,
    DamageClass::Missing,        DamageClass::SmoothWear,       DamageClass::NormalFracture,
    DamageClass::NoRingoutTop,   DamageClass::RingoutTop,       DamageClass::ShoulderRODamage,
    DamageClass::TangentialFracture, DamageClass::GreenWithTFLine};

inline constexpr std::array<FailureCause, kCauseCount> kAllCauses{
    FailureCause::SmoothWear,  FailureCause::ThermalWear, FailureCause::CoreOut,
    FailureCause::HardFormationTransition, FailureCause::SoftFormationTransition,
    FailureCause::StickSlip,   FailureCause::Axial,       FailureCause::Whirl,
    FailureCause::Green};

constexpr std::size_t index_of(LocationClass c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index_of(DamageClass c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index_of(FailureCause c) { return static_cast<std::size_t>(c); }

/// Canonical class codes ("Sh", "G_G", "thermal_wear", ...).
std::string_view code(LocationClass c);
std::string_view code(DamageClass c);
std::string_view code(FailureCause c);

/// Human-readable cause name used in tables ("Hard Formation Transition").
std::string_view display_name(FailureCause c);

/// Damage families used by the main-damage policy. Every DamageClass belongs to
/// exactly one group.
enum class DamageGroup : std::uint8_t { Fracture, Missing, Thermal, Smooth, Green };

DamageGroup damage_group(DamageClass c);

enum class ClassKind : std::uint8_t { Location, Damage, Cause };

std::string_view kind_name(ClassKind k);

/// Exact, case-sensitive code lookup. Throws UnknownClassError listing the valid codes.
template <class ClassT>
ClassT parse_class(std::string_view code);

template <>
LocationClass parse_class<LocationClass>(std::string_view code);
template <>
DamageClass parse_class<DamageClass>(std::string_view code);
template <>
FailureCause parse_class<FailureCause>(std::string_view code);

template <class ClassT>
struct ClassTraits;

template <>
struct ClassTraits<LocationClass> {
  static constexpr ClassKind kind = ClassKind::Location;
  static constexpr std::size_t count = kLocationCount;
  static constexpr const auto& all = kAllLocations;
};

template <>
struct ClassTraits<DamageClass> {
  static constexpr ClassKind kind = ClassKind::Damage;
  static constexpr std::size_t count = kDamageCount;
  static constexpr const auto& all = kAllDamages;
};

// ---------------------------------------------------------------------------
// Geometry and detections
// ---------------------------------------------------------------------------

/// Axis-aligned box in normalized center/size form: every field is a fraction
/// of the image width or height.
struct BoundingBox {
  double cx{};
  double cy{};
  double w{};
  double h{};

  /// Checked constructor; throws Error when the box violates the range invariants.
  static BoundingBox make(double cx, double cy, double w, double h);

  bool valid() const;

  double x1() const { return cx - w / 2.0; }
  double x2() const { return cx + w / 2.0; }
  double y1() const { return cy - h / 2.0; }
  double y2() const { return cy + h / 2.0; }
  double area() const { return w * h; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

template <class ClassT>
struct Detection {
  BoundingBox box;
  ClassT label{};
  double confidence{1.0};

  friend bool operator==(const Detection&, const Detection&) = default;
};

enum class ViewKind : std::uint8_t { Top, Side };

/// Top view, or the n-th side view (n >= 1).
struct ImageView {
  ViewKind kind{ViewKind::Side};
  int side_index{1};

  static ImageView top() { return {ViewKind::Top, 0}; }
  static ImageView side(int index) { return {ViewKind::Side, index}; }

  friend bool operator==(const ImageView&, const ImageView&) = default;
};

template <class ClassT>
struct ImageRecord {
  std::string image_id;
  ImageView view;
  std::vector<Detection<ClassT>> detections;
};

using LocationDetection = Detection<LocationClass>;
using DamageDetection = Detection<DamageClass>;
using LocationImage = ImageRecord<LocationClass>;
using DamageImage = ImageRecord<DamageClass>;

/// A multi-label diagnosis or ground-truth label set.
using CauseLabels = std::set<FailureCause>;

inline constexpr int kDefaultMainBlades = 7;

/// Both detector streams for one drill bit. Entry i of every image list refers
/// to the same physical image; the ground-truth lists are empty-detection
/// records when no annotation file was supplied.
struct BitDetections {
  std::string bit_id;
  int num_main_blades{kDefaultMainBlades};
  std::vector<LocationImage> location_images;
  std::vector<DamageImage> damage_images;
  std::vector<LocationImage> gt_location_images;
  std::vector<DamageImage> gt_damage_images;
};

}  // namespace bitforensics
