#include "anthro.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace periorbital {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

RasterMask intersect(const RasterMask& a, const RasterMask& b) {
  std::vector<std::uint8_t> bits(a.bits().size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = a.bits()[i] & b.bits()[i];
  return RasterMask(a.width(), a.height(), std::move(bits), a.class_label());
}

RasterMask clean(const RasterMask& m) { return m.empty() ? m : largest_component(m); }

// Evaluates the margin polynomial at x, or nothing when x is outside its domain.
std::optional<double> margin_at(const EyeGeometry& eye, Margin which, double x) {
  if (!eye.margins) return std::nullopt;
  const MarginPoly& p = which == Margin::Superior ? eye.margins->superior : eye.margins->inferior;
  if (!p.in_domain(x)) return std::nullopt;
  return p(x);
}

struct ColumnExtent {
  int min_y;
  int max_y;
};

std::optional<ColumnExtent> column_extent(const RasterMask& m, int x) {
  if (x < 0 || x >= m.width()) return std::nullopt;
  int lo = -1, hi = -1;
  for (int y = 0; y < m.height(); ++y)
    if (m.at(x, y)) {
      if (lo < 0) lo = y;
      hi = y;
    }
  if (lo < 0) return std::nullopt;
  return ColumnExtent{lo, hi};
}

// Brow extent at a possibly half-integer column: a fractional reference is
// served by averaging the two neighbouring columns so that mirrored inputs
// give mirrored answers.
std::optional<std::pair<double, double>> brow_extent_at(const RasterMask& brow, double x) {
  const double fl = std::floor(x);
  if (x == fl) {
    const auto e = column_extent(brow, static_cast<int>(fl));
    if (!e) return std::nullopt;
    return std::pair<double, double>{e->min_y, e->max_y};
  }
  const auto a = column_extent(brow, static_cast<int>(fl));
  const auto b = column_extent(brow, static_cast<int>(fl) + 1);
  if (!a || !b) return std::nullopt;
  return std::pair<double, double>{0.5 * (a->min_y + b->min_y), 0.5 * (a->max_y + b->max_y)};
}

}  // namespace

EyeGeometry analyze_eye(const EyeRecord& eye) {
  eye.validate();
  EyeGeometry g;
  g.side = eye.side;
  g.origin = eye.origin;
  g.fissure = clean(mask_union(eye.sclera, eye.iris));
  g.iris = clean(eye.iris);
  g.brow = clean(eye.brow);
  g.sclera_area = intersect(eye.sclera, g.fissure).count();
  g.iris_area = g.iris.count();
  if (!g.iris.empty()) g.iris_fit = fit_iris(g.iris);
  if (!g.fissure.empty()) {
    g.canthi = canthi(g.fissure, eye.side);
    try {
      g.margins = fit_margins(g.fissure);
    } catch (const Error&) {
      g.margins.reset();
    }
  }
  return g;
}

Reading mrd(const EyeGeometry& eye, MrdKind which) {
  if (!eye.iris_fit) return {};
  const Point c = eye.iris_fit->center;
  const auto lid = margin_at(eye, which == MrdKind::Mrd1 ? Margin::Superior : Margin::Inferior, c.x);
  if (!lid) return {};
  const double d = which == MrdKind::Mrd1 ? c.y - *lid : *lid - c.y;
  if (d < 0.0) return Reading{0.0, true};
  return Reading{d, false};
}

Reading scleral_show(const EyeGeometry& eye, Margin which) {
  if (!eye.iris_fit) return {};
  const Point c = eye.iris_fit->center;
  const double r = 0.5 * eye.iris_fit->diameter_px;
  const auto lid = margin_at(eye, which, c.x);
  if (!lid) return {};
  const double show = which == Margin::Superior ? (c.y - r) - *lid : *lid - (c.y + r);
  return Reading{std::max(0.0, show), false};
}

Fissure palpebral_fissure(const EyeGeometry& eye) {
  Fissure f;
  const Reading m1 = mrd(eye, MrdKind::Mrd1);
  const Reading m2 = mrd(eye, MrdKind::Mrd2);
  if (m1.value && m2.value) f.vpf = *m1.value + *m2.value;
  if (eye.canthi) f.hpf = std::abs(eye.canthi->medial.x - eye.canthi->lateral.x);
  return f;
}

Intercanthal intercanthal(const EyeGeometry& right, const EyeGeometry& left) {
  Intercanthal out;
  if (right.canthi && left.canthi) {
    out.icd = std::abs(left.to_face(left.canthi->medial).x - right.to_face(right.canthi->medial).x);
    out.ocd = std::abs(left.to_face(left.canthi->lateral).x - right.to_face(right.canthi->lateral).x);
  }
  if (right.iris_fit && left.iris_fit)
    out.ipd = std::abs(left.to_face(left.iris_fit->center).x - right.to_face(right.iris_fit->center).x);
  return out;
}

std::optional<double> canthal_tilt(Point medial, Point lateral, const FacialAxis& axis) {
  const Point v{lateral.x - medial.x, lateral.y - medial.y};
  if (std::hypot(v.x, v.y) < 1e-12) return std::nullopt;
  // Component along the facial axis is "up"; the perpendicular magnitude is
  // the horizontal run irrespective of which side the eye is on.
  const double rise = v.x * axis.direction.x + v.y * axis.direction.y;
  const double run = std::abs(v.x * -axis.direction.y + v.y * axis.direction.x);
  return std::atan2(rise, run) * kDegPerRad;
}

std::optional<double> canthal_tilt(const EyeGeometry& eye, const FacialAxis& axis) {
  if (!eye.canthi) return std::nullopt;
  return canthal_tilt(eye.to_face(eye.canthi->medial), eye.to_face(eye.canthi->lateral), axis);
}

double vertical_dystopia(Point right_medial, Point left_medial, const FacialAxis& axis) {
  const auto along = [&](Point p) {
    return (p.x - axis.origin.x) * axis.direction.x + (p.y - axis.origin.y) * axis.direction.y;
  };
  // Both intersections lie on the axis line, so their separation is the
  // difference of the scalar projections.
  return std::abs(along(right_medial) - along(left_medial));
}

std::optional<double> vertical_dystopia(const EyeGeometry& right, const EyeGeometry& left, const FacialAxis& axis) {
  if (!right.canthi || !left.canthi) return std::nullopt;
  return vertical_dystopia(right.to_face(right.canthi->medial), left.to_face(left.canthi->medial), axis);
}

std::optional<double> signed_height_above_line(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (len < 1e-12) return std::nullopt;
  // Unit normal chosen to point up the image (negative y).
  double nx = -dy / len, ny = dx / len;
  if (ny > 0.0 || (ny == 0.0 && nx < 0.0)) {
    nx = -nx;
    ny = -ny;
  }
  return (p.x - a.x) * nx + (p.y - a.y) * ny;
}

CanthalHeights canthal_heights(const EyeGeometry& right, const EyeGeometry& left) {
  CanthalHeights h;
  if (!right.iris_fit || !left.iris_fit) return h;
  const Point a = right.to_face(right.iris_fit->center);
  const Point b = left.to_face(left.iris_fit->center);
  if (right.canthi) {
    h.right_medial = signed_height_above_line(right.to_face(right.canthi->medial), a, b);
    h.right_lateral = signed_height_above_line(right.to_face(right.canthi->lateral), a, b);
  }
  if (left.canthi) {
    h.left_medial = signed_height_above_line(left.to_face(left.canthi->medial), a, b);
    h.left_lateral = signed_height_above_line(left.to_face(left.canthi->lateral), a, b);
  }
  return h;
}

std::array<std::optional<double>, 6> brow_heights(const EyeGeometry& eye) {
  std::array<std::optional<double>, 6> out{};
  if (eye.brow.empty()) return out;
  const std::array<std::optional<Point>, 3> refs = {
      eye.canthi ? std::optional<Point>(eye.canthi->medial) : std::nullopt,
      eye.iris_fit ? std::optional<Point>(eye.iris_fit->center) : std::nullopt,
      eye.canthi ? std::optional<Point>(eye.canthi->lateral) : std::nullopt,
  };
  for (std::size_t i = 0; i < 3; ++i) {
    if (!refs[i]) continue;
    const auto ext = brow_extent_at(eye.brow, refs[i]->x);
    if (!ext) continue;
    out[i] = refs[i]->y - ext->first;
    out[i + 3] = refs[i]->y - ext->second;
  }
  return out;
}

std::optional<double> scleral_area_ratio(const EyeGeometry& eye) {
  if (eye.iris_area == 0 || eye.sclera_area == 0) return std::nullopt;
  return static_cast<double>(eye.sclera_area) / static_cast<double>(eye.iris_area);
}

FaceMeasurement measure_face(const FaceRecord& face) {
  face.validate();
  FaceMeasurement out;
  const MidlineSplit halves = split_midline(face);
  const EyeGeometry right = analyze_eye(halves.right);
  const EyeGeometry left = analyze_eye(halves.left);
  const FacialAxis axis = axis_from_landmarks(face.landmarks.nasion, face.landmarks.hairline_mid);
  MeasurementSet& px = out.px;

  const auto put = [&](EyeSide side, SideFeature f, const std::optional<double>& v) {
    if (v) px.set(side, f, *v);
  };
  const auto put_reading = [&](EyeSide side, SideFeature f, const Reading& r) {
    put(side, f, r.value);
    if (r.clamped)
      out.notes.push_back(std::string(to_string(side)) + "_" + std::string(side_feature_name(f)) +
                          " clamped to 0: lid crosses the iris center");
  };

  const CanthalHeights heights = canthal_heights(right, left);
  for (const EyeGeometry* eye : {&right, &left}) {
    const EyeSide s = eye->side;
    put_reading(s, SideFeature::Mrd1, mrd(*eye, MrdKind::Mrd1));
    put_reading(s, SideFeature::Mrd2, mrd(*eye, MrdKind::Mrd2));
    put_reading(s, SideFeature::Iss, scleral_show(*eye, Margin::Inferior));
    put_reading(s, SideFeature::Sss, scleral_show(*eye, Margin::Superior));
    const Fissure fis = palpebral_fissure(*eye);
    put(s, SideFeature::Vpf, fis.vpf);
    put(s, SideFeature::Hpf, fis.hpf);
    put(s, SideFeature::MedialCanthalHeight, s == EyeSide::Right ? heights.right_medial : heights.left_medial);
    put(s, SideFeature::LateralCanthalHeight, s == EyeSide::Right ? heights.right_lateral : heights.left_lateral);
    put(s, SideFeature::CanthalTiltDeg, canthal_tilt(*eye, axis));
    put(s, SideFeature::ScleralAreaRatio, scleral_area_ratio(*eye));
    const auto brow = brow_heights(*eye);
    for (std::size_t i = 0; i < brow.size(); ++i)
      put(s, static_cast<SideFeature>(static_cast<std::size_t>(SideFeature::BrowSupMedial) + i), brow[i]);
  }

  const Intercanthal ic = intercanthal(right, left);
  if (ic.icd) px.set(GlobalFeature::Icd, *ic.icd);
  if (ic.ipd) px.set(GlobalFeature::Ipd, *ic.ipd);
  if (ic.ocd) px.set(GlobalFeature::Ocd, *ic.ocd);
  if (const auto vd = vertical_dystopia(right, left, axis)) px.set(GlobalFeature::VerticalDystopia, *vd);

  if (right.iris_fit) out.right_scale = Scale::from_iris_diameter(right.iris_fit->diameter_px);
  if (left.iris_fit) out.left_scale = Scale::from_iris_diameter(left.iris_fit->diameter_px);
  out.mm = to_mm(px, out.left_scale, out.right_scale);
  return out;
}

}  // namespace periorbital
