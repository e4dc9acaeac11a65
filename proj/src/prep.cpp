#include "prep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "maskgeom.hpp"

namespace periorbital {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

}  // namespace

FacialAxis axis_from_landmarks(Point nasion, Point hairline_mid) {
  const double dx = hairline_mid.x - nasion.x;
  const double dy = hairline_mid.y - nasion.y;
  const double len = std::hypot(dx, dy);
  if (!(len > 1e-9) || !std::isfinite(len))
    throw Error(ErrorCode::Degenerate, "facial axis: nasion and hairline midpoint coincide");
  return FacialAxis{nasion, Point{dx / len, dy / len}};
}

Point RigidTransform::apply(Point p) const noexcept {
  const double a = rotation_deg / kDegPerRad;
  const double c = std::cos(a), s = std::sin(a);
  const double x = p.x - center.x, y = p.y - center.y;
  return Point{c * x - s * y + center.x + translation.x, s * x + c * y + center.y + translation.y};
}

Point RigidTransform::invert(Point p) const noexcept {
  const double a = rotation_deg / kDegPerRad;
  const double c = std::cos(a), s = std::sin(a);
  const double x = p.x - translation.x - center.x, y = p.y - translation.y - center.y;
  return Point{c * x + s * y + center.x, -s * x + c * y + center.y};
}

RigidTransform RigidTransform::inverse() const noexcept {
  // apply(p) = R(p - c) + c + t  ==>  p = R^T(q - c - t) + c.
  // Express as rotation about c' = c + t with no translation, then shift.
  RigidTransform inv;
  inv.rotation_deg = -rotation_deg;
  inv.center = Point{center.x + translation.x, center.y + translation.y};
  inv.translation = Point{-translation.x, -translation.y};
  return inv;
}

RasterMask resample(const RasterMask& mask, const RigidTransform& transform) {
  RasterMask out(mask.width(), mask.height(), mask.class_label());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      const Point src = transform.invert(Point{static_cast<double>(x), static_cast<double>(y)});
      const auto sx = static_cast<int>(std::lround(src.x));
      const auto sy = static_cast<int>(std::lround(src.y));
      if (mask.test(sx, sy)) out.set(x, y);
    }
  return out;
}

FaceRecord transform_face(const FaceRecord& face, const RigidTransform& transform) {
  FaceRecord out = face;
  for (auto side : {EyeSide::Right, EyeSide::Left}) {
    const EyeRecord& src = face.eye(side);
    if (src.origin.x != 0.0 || src.origin.y != 0.0)
      throw Error(ErrorCode::InvalidArgument, "transform_face expects full-frame eye records");
    EyeRecord& dst = out.eye(side);
    dst.sclera = resample(src.sclera, transform);
    dst.iris = resample(src.iris, transform);
    dst.brow = resample(src.brow, transform);
  }
  out.landmarks.nasion = transform.apply(face.landmarks.nasion);
  out.landmarks.hairline_mid = transform.apply(face.landmarks.hairline_mid);
  return out;
}

std::pair<FaceRecord, RigidTransform> normalize_orientation(const FaceRecord& face) {
  const FacialAxis axis = axis_from_landmarks(face.landmarks.nasion, face.landmarks.hairline_mid);
  // Angle that carries the axis direction onto (0, -1).
  const Point up{0.0, -1.0};
  const double cross = axis.direction.x * up.y - axis.direction.y * up.x;
  const double dot = axis.direction.x * up.x + axis.direction.y * up.y;
  RigidTransform t;
  t.rotation_deg = std::atan2(cross, dot) * kDegPerRad;
  t.center = face.landmarks.nasion;
  if (std::abs(t.rotation_deg) < 1e-12) {
    t.rotation_deg = 0.0;
    return {face, t};
  }
  FaceRecord out = transform_face(face, t);
  // Pin the nasion exactly; rotation about it is analytically a fixed point.
  out.landmarks.nasion = face.landmarks.nasion;
  out.landmarks.hairline_mid.x = face.landmarks.nasion.x;
  return {std::move(out), t};
}

RasterMask crop(const RasterMask& mask, int x0, int y0, int width, int height) {
  RasterMask out(width, height, mask.class_label());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (mask.test(x0 + x, y0 + y)) out.set(x, y);
  return out;
}

MidlineSplit split_midline(const FaceRecord& face) {
  MidlineSplit s;
  const RasterMask& ri = face.right.iris;
  const RasterMask& li = face.left.iris;
  if (!ri.empty() && !li.empty())
    s.midline_x = 0.5 * (fit_iris(largest_component(ri)).center.x + fit_iris(largest_component(li)).center.x);
  else
    s.midline_x = 0.5 * face.width;
  const int w = face.width, h = face.height;
  s.split_column = std::clamp(static_cast<int>(std::ceil(s.midline_x)), 1, w - 1);

  const auto cut = [&](const EyeRecord& eye, int x0, int width) {
    EyeRecord e;
    e.side = eye.side;
    e.id = eye.id;
    e.sclera = crop(eye.sclera, x0, 0, width, h);
    e.iris = crop(eye.iris, x0, 0, width, h);
    e.brow = crop(eye.brow, x0, 0, width, h);
    e.origin = Point{eye.origin.x + x0, eye.origin.y};
    return e;
  };
  s.right = cut(face.right, 0, s.split_column);
  s.left = cut(face.left, s.split_column, w - s.split_column);
  return s;
}

}  // namespace periorbital
