#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace periorbital {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  EmptyMask,
  Degenerate,
  OutOfBounds,
  Io,
  Parse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Image coordinates: x is the column (rightward), y is the row (downward).
// "Superior" therefore means smaller y.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class MaskClass { Sclera, Iris, Brow };

std::string_view to_string(MaskClass cls);

class RasterMask {
 public:
  RasterMask() = default;
  RasterMask(int width, int height, MaskClass cls = MaskClass::Sclera);
  RasterMask(int width, int height, std::vector<std::uint8_t> bits, MaskClass cls = MaskClass::Sclera);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  MaskClass class_label() const noexcept { return cls_; }
  void set_class_label(MaskClass cls) noexcept { cls_ = cls; }

  bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
  // Out-of-bounds reads are background.
  bool test(int x, int y) const noexcept { return in_bounds(x, y) && at(x, y); }
  void set(int x, int y, bool on = true) noexcept { bits_[index(x, y)] = on ? 1 : 0; }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const RasterMask& a, const RasterMask& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  MaskClass cls_ = MaskClass::Sclera;
  std::vector<std::uint8_t> bits_;
};

RasterMask mask_union(const RasterMask& a, const RasterMask& b);

// Anatomical side of the subject. In a frontal photograph the subject's
// right eye sits on the image-left half.
enum class EyeSide { Left, Right };

std::string_view to_string(EyeSide side);

// +1 when the medial direction (toward the image midline) is +x.
inline int medial_sign(EyeSide side) noexcept { return side == EyeSide::Right ? 1 : -1; }

struct EyeRecord {
  EyeSide side = EyeSide::Right;
  RasterMask sclera;
  RasterMask iris;
  RasterMask brow;
  std::string id;
  // Face-frame coordinate of this record's pixel (0,0); non-zero after cropping.
  Point origin;

  int width() const noexcept { return sclera.width(); }
  int height() const noexcept { return sclera.height(); }
  void validate() const;
};

struct Landmarks {
  Point nasion;
  Point hairline_mid;
};

struct FaceRecord {
  EyeRecord right;
  EyeRecord left;
  Landmarks landmarks;
  int width = 0;
  int height = 0;
  std::string id;

  const EyeRecord& eye(EyeSide side) const noexcept { return side == EyeSide::Right ? right : left; }
  EyeRecord& eye(EyeSide side) noexcept { return side == EyeSide::Right ? right : left; }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Measurement registry

enum class SideFeature : std::size_t {
  Mrd1,
  Mrd2,
  Iss,
  Sss,
  Vpf,
  Hpf,
  MedialCanthalHeight,
  LateralCanthalHeight,
  CanthalTiltDeg,
  ScleralAreaRatio,
  BrowSupMedial,
  BrowSupCentral,
  BrowSupLateral,
  BrowInfMedial,
  BrowInfCentral,
  BrowInfLateral,
};

enum class GlobalFeature : std::size_t { Icd, Ipd, Ocd, VerticalDystopia };

inline constexpr std::size_t kSideFeatureCount = 16;
inline constexpr std::size_t kGlobalFeatureCount = 4;
inline constexpr std::size_t kFeatureCount = 2 * kSideFeatureCount + kGlobalFeatureCount;

// Registry layout: right_* (16), left_* (16), then the four face-global features.
constexpr std::size_t feature_index(EyeSide side, SideFeature f) noexcept {
  return (side == EyeSide::Right ? 0 : kSideFeatureCount) + static_cast<std::size_t>(f);
}
constexpr std::size_t feature_index(GlobalFeature f) noexcept {
  return 2 * kSideFeatureCount + static_cast<std::size_t>(f);
}

std::string_view side_feature_name(SideFeature f);
std::string_view global_feature_name(GlobalFeature f);

// Fixed, public ordering used by the CSV schema and classifier inputs.
const std::vector<std::string>& feature_registry();
std::optional<std::size_t> find_feature(std::string_view name);

// Dimensionless per-side features are left untouched by unit conversion.
bool is_dimensionless(SideFeature f) noexcept;
bool is_brow_feature(std::size_t index) noexcept;

// Index of the opposite-side counterpart, or the same index for globals.
std::size_t mirror_feature_index(std::size_t index) noexcept;

enum class Units { Px, Mm };

std::string_view to_string(Units u);
Units parse_units(std::string_view s);

class MeasurementSet {
 public:
  MeasurementSet() { values_.fill(0.0); }
  explicit MeasurementSet(Units units) : units_(units) { values_.fill(0.0); }

  Units units() const noexcept { return units_; }
  void set_units(Units u) noexcept { units_ = u; }

  bool valid(std::size_t i) const { return valid_.test(i); }
  double value(std::size_t i) const { return values_.at(i); }
  std::optional<double> get(std::size_t i) const {
    if (!valid_.test(i)) return std::nullopt;
    return values_[i];
  }
  void set(std::size_t i, double v);
  void invalidate(std::size_t i);

  std::optional<double> get(EyeSide s, SideFeature f) const { return get(feature_index(s, f)); }
  std::optional<double> get(GlobalFeature f) const { return get(feature_index(f)); }
  void set(EyeSide s, SideFeature f, double v) { set(feature_index(s, f), v); }
  void set(GlobalFeature f, double v) { set(feature_index(f), v); }

  std::size_t valid_count() const noexcept { return valid_.count(); }
  std::uint64_t valid_bitmask() const noexcept { return valid_.to_ullong(); }
  void set_valid_bitmask(std::uint64_t mask);

  const std::array<double, kFeatureCount>& values() const noexcept { return values_; }

 private:
  Units units_ = Units::Px;
  std::array<double, kFeatureCount> values_{};
  std::bitset<kFeatureCount> valid_;
};

// The reference iris diameter that fixes the pixel-to-millimeter scale.
inline constexpr double kIrisDiameterMm = 11.71;

struct Scale {
  double mm_per_px = 0.0;

  static Scale from_iris_diameter(double diameter_px);
};

// Converts a pixel-unit set to millimeters. Per-side linear features use
// that side's scale; face-global features use the mean of both scales and
// are invalidated when either scale is missing.
MeasurementSet to_mm(const MeasurementSet& px, std::optional<Scale> left, std::optional<Scale> right);

// ---------------------------------------------------------------------------
// Measurement CSV: "id,units,<36 registry names>,valid_bitmask".

struct MeasurementRow {
  std::string id;
  MeasurementSet set;
};

std::string measurement_csv_header();
void write_measurement_csv(std::ostream& out, const std::vector<MeasurementRow>& rows);
std::vector<MeasurementRow> read_measurement_csv(std::istream& in);

std::string format_fixed(double v, int decimals = 6);

}  // namespace periorbital
