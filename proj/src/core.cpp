#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "csv.hpp"

namespace periorbital {

std::string_view to_string(MaskClass cls) {
  switch (cls) {
    case MaskClass::Sclera: return "sclera";
    case MaskClass::Iris: return "iris";
    case MaskClass::Brow: return "brow";
  }
  return "?";
}

std::string_view to_string(EyeSide side) { return side == EyeSide::Right ? "right" : "left"; }

RasterMask::RasterMask(int width, int height, MaskClass cls) : width_(width), height_(height), cls_(cls) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "mask dimensions must be >= 1");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

RasterMask::RasterMask(int width, int height, std::vector<std::uint8_t> bits, MaskClass cls)
    : width_(width), height_(height), cls_(cls), bits_(std::move(bits)) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "mask dimensions must be >= 1");
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(ErrorCode::DimensionMismatch, "mask bit count does not match width*height");
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t RasterMask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

RasterMask mask_union(const RasterMask& a, const RasterMask& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw Error(ErrorCode::DimensionMismatch, "mask_union: dimension mismatch");
  std::vector<std::uint8_t> bits(a.bits().size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (a.bits()[i] | b.bits()[i]) ? 1 : 0;
  return RasterMask(a.width(), a.height(), std::move(bits), a.class_label());
}

void EyeRecord::validate() const {
  const auto same = [&](const RasterMask& m) { return m.width() == sclera.width() && m.height() == sclera.height(); };
  if (sclera.width() < 1) throw Error(ErrorCode::InvalidArgument, "eye record has no masks");
  if (!same(iris) || !same(brow))
    throw Error(ErrorCode::DimensionMismatch, "sclera, iris and brow masks must share dimensions");
}

void FaceRecord::validate() const {
  right.validate();
  left.validate();
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "face image size must be positive");
  const auto finite = [](Point p) { return std::isfinite(p.x) && std::isfinite(p.y); };
  if (!finite(landmarks.nasion) || !finite(landmarks.hairline_mid))
    throw Error(ErrorCode::InvalidArgument, "landmarks must be finite");
  if (!(landmarks.nasion.y > landmarks.hairline_mid.y))
    throw Error(ErrorCode::InvalidArgument, "nasion must lie below the hairline midpoint");
}

// ---------------------------------------------------------------------------

std::string_view side_feature_name(SideFeature f) {
  static constexpr std::array<std::string_view, kSideFeatureCount> names = {
      "mrd1",
      "mrd2",
      "iss",
      "sss",
      "vpf",
      "hpf",
      "medial_canthal_height",
      "lateral_canthal_height",
      "canthal_tilt_deg",
      "scleral_area_ratio",
      "brow_sup_medial",
      "brow_sup_central",
      "brow_sup_lateral",
      "brow_inf_medial",
      "brow_inf_central",
      "brow_inf_lateral",
  };
  return names[static_cast<std::size_t>(f)];
}

std::string_view global_feature_name(GlobalFeature f) {
  static constexpr std::array<std::string_view, kGlobalFeatureCount> names = {"icd", "ipd", "ocd",
                                                                               "vertical_dystopia"};
  return names[static_cast<std::size_t>(f)];
}

const std::vector<std::string>& feature_registry() {
  static const std::vector<std::string> registry = [] {
    std::vector<std::string> r;
    r.reserve(kFeatureCount);
    for (auto side : {EyeSide::Right, EyeSide::Left})
      for (std::size_t i = 0; i < kSideFeatureCount; ++i)
        r.push_back(std::string(to_string(side)) + "_" + std::string(side_feature_name(static_cast<SideFeature>(i))));
    for (std::size_t i = 0; i < kGlobalFeatureCount; ++i)
      r.emplace_back(global_feature_name(static_cast<GlobalFeature>(i)));
    return r;
  }();
  return registry;
}

std::optional<std::size_t> find_feature(std::string_view name) {
  const auto& reg = feature_registry();
  const auto it = std::find(reg.begin(), reg.end(), name);
  if (it == reg.end()) return std::nullopt;
  return static_cast<std::size_t>(it - reg.begin());
}

bool is_dimensionless(SideFeature f) noexcept {
  return f == SideFeature::CanthalTiltDeg || f == SideFeature::ScleralAreaRatio;
}

bool is_brow_feature(std::size_t index) noexcept {
  if (index >= 2 * kSideFeatureCount) return false;
  return index % kSideFeatureCount >= static_cast<std::size_t>(SideFeature::BrowSupMedial);
}

std::size_t mirror_feature_index(std::size_t index) noexcept {
  if (index >= 2 * kSideFeatureCount) return index;
  return index < kSideFeatureCount ? index + kSideFeatureCount : index - kSideFeatureCount;
}

std::string_view to_string(Units u) { return u == Units::Px ? "px" : "mm"; }

Units parse_units(std::string_view s) {
  if (s == "px") return Units::Px;
  if (s == "mm") return Units::Mm;
  throw Error(ErrorCode::Parse, "unknown units '" + std::string(s) + "'");
}

void MeasurementSet::set(std::size_t i, double v) {
  if (i >= kFeatureCount) throw Error(ErrorCode::OutOfBounds, "feature index out of range");
  if (!std::isfinite(v)) {
    invalidate(i);
    return;
  }
  values_[i] = v;
  valid_.set(i);
}

void MeasurementSet::invalidate(std::size_t i) {
  if (i >= kFeatureCount) throw Error(ErrorCode::OutOfBounds, "feature index out of range");
  values_[i] = 0.0;
  valid_.reset(i);
}

void MeasurementSet::set_valid_bitmask(std::uint64_t mask) {
  valid_ = std::bitset<kFeatureCount>(mask);
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (!valid_.test(i)) values_[i] = 0.0;
}

Scale Scale::from_iris_diameter(double diameter_px) {
  if (!(diameter_px > 0.0) || !std::isfinite(diameter_px))
    throw Error(ErrorCode::InvalidArgument, "iris diameter must be positive and finite");
  return Scale{kIrisDiameterMm / diameter_px};
}

MeasurementSet to_mm(const MeasurementSet& px, std::optional<Scale> left, std::optional<Scale> right) {
  if (px.units() != Units::Px) throw Error(ErrorCode::InvalidArgument, "to_mm expects a pixel-unit set");
  MeasurementSet mm(Units::Mm);
  for (auto side : {EyeSide::Right, EyeSide::Left}) {
    const auto& scale = side == EyeSide::Right ? right : left;
    for (std::size_t i = 0; i < kSideFeatureCount; ++i) {
      const auto f = static_cast<SideFeature>(i);
      const auto v = px.get(side, f);
      if (!v) continue;
      if (is_dimensionless(f))
        mm.set(side, f, *v);
      else if (scale)
        mm.set(side, f, *v * scale->mm_per_px);
    }
  }
  if (left && right) {
    const double mean_scale = 0.5 * (left->mm_per_px + right->mm_per_px);
    for (std::size_t i = 0; i < kGlobalFeatureCount; ++i) {
      const auto f = static_cast<GlobalFeature>(i);
      if (const auto v = px.get(f)) mm.set(f, *v * mean_scale);
    }
  }
  return mm;
}

// ---------------------------------------------------------------------------

std::string format_fixed(double v, int decimals) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // Normalize negative zero so equal sets serialize identically.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string measurement_csv_header() {
  std::string h = "id,units";
  for (const auto& name : feature_registry()) h += "," + name;
  h += ",valid_bitmask";
  return h;
}

void write_measurement_csv(std::ostream& out, const std::vector<MeasurementRow>& rows) {
  out << measurement_csv_header() << '\n';
  for (const auto& row : rows) {
    out << csv::escape(row.id) << ',' << to_string(row.set.units());
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      out << ',' << (row.set.valid(i) ? format_fixed(row.set.value(i)) : std::string("nan"));
    out << ',' << row.set.valid_bitmask() << '\n';
  }
}

std::vector<MeasurementRow> read_measurement_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!csv::next_record(in, fields)) throw Error(ErrorCode::Parse, "measurement CSV is empty");
  if (csv::join(fields) != measurement_csv_header())
    throw Error(ErrorCode::Parse, "measurement CSV header does not match the feature registry");
  std::vector<MeasurementRow> rows;
  std::size_t line = 1;
  while (csv::next_record(in, fields)) {
    ++line;
    if (fields.size() != kFeatureCount + 3)
      throw Error(ErrorCode::Parse, "measurement CSV line " + std::to_string(line) + ": wrong field count");
    MeasurementRow row;
    row.id = fields[0];
    row.set.set_units(parse_units(fields[1]));
    std::uint64_t mask = 0;
    try {
      mask = std::stoull(fields[kFeatureCount + 2]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "measurement CSV line " + std::to_string(line) + ": bad valid_bitmask");
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (!(mask >> i & 1U)) continue;
      const double v = csv::parse_double(fields[i + 2]);
      if (!std::isfinite(v))
        throw Error(ErrorCode::Parse, "measurement CSV line " + std::to_string(line) + ": valid feature is nan");
      row.set.set(i, v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace periorbital
