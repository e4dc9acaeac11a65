#include <numbers>

#include "anthro.hpp"
#include "doctest.h"
#include "prep.hpp"
#include "support.hpp"
#include "synth.hpp"

using namespace periorbital;

namespace {

RasterMask flip_x(const RasterMask& m) {
  RasterMask out(m.width(), m.height(), m.class_label());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out.set(m.width() - 1 - x, y, m.at(x, y));
  return out;
}

// Horizontal mirror image: the subject's eyes trade places.
FaceRecord mirror(const FaceRecord& f) {
  FaceRecord m = f;
  const auto flip_eye = [&](const EyeRecord& src, EyeSide side) {
    EyeRecord e = src;
    e.side = side;
    e.sclera = flip_x(src.sclera);
    e.iris = flip_x(src.iris);
    e.brow = flip_x(src.brow);
    return e;
  };
  m.right = flip_eye(f.left, EyeSide::Right);
  m.left = flip_eye(f.right, EyeSide::Left);
  const auto fx = [&](Point p) { return Point{f.width - 1 - p.x, p.y}; };
  m.landmarks = {fx(f.landmarks.nasion), fx(f.landmarks.hairline_mid)};
  return m;
}

RasterMask shift(const RasterMask& m, int dx, int dy) {
  RasterMask out(m.width(), m.height(), m.class_label());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y)) out.set(x + dx, y + dy);
  return out;
}

FaceRecord translate(const FaceRecord& f, int dx, int dy) {
  FaceRecord t = f;
  for (EyeRecord* e : {&t.right, &t.left}) {
    e->sclera = shift(e->sclera, dx, dy);
    e->iris = shift(e->iris, dx, dy);
    e->brow = shift(e->brow, dx, dy);
  }
  for (Point* p : {&t.landmarks.nasion, &t.landmarks.hairline_mid}) {
    p->x += dx;
    p->y += dy;
  }
  return t;
}

FaceRecord synthetic(std::size_t i, double rotation = 0.0) {
  FaceParams p = sample_face_params(i % 2 ? Phenotype::Disease : Phenotype::Healthy, 21, i);
  p.rotation_deg = rotation;
  return render_face(p).face;
}

}  // namespace

TEST_CASE("facial axis from landmarks") {
  const FacialAxis a = axis_from_landmarks({100, 200}, {100, 50});
  CHECK(a.direction == Point{0, -1});
  CHECK(a.origin == Point{100, 200});
  const FacialAxis b = axis_from_landmarks({100, 200}, {150, 50});
  const double n = std::hypot(50.0, 150.0);
  CHECK(b.direction.x == doctest::Approx(50 / n));
  CHECK(b.direction.y == doctest::Approx(-150 / n));
  CHECK_THROWS_AS(axis_from_landmarks({1, 1}, {1, 1}), Error);
}

TEST_CASE("rigid transform inverts") {
  const RigidTransform t{17.0, {30, 40}, {3, -2}};
  for (Point p : {Point{0, 0}, Point{12.5, -7}, Point{300, 90}}) {
    const Point q = t.invert(t.apply(p));
    CHECK(q.x == doctest::Approx(p.x));
    CHECK(q.y == doctest::Approx(p.y));
  }
  // Positive angles turn +x toward +y.
  const Point r = RigidTransform{90.0, {0, 0}, {0, 0}}.apply({1, 0});
  CHECK(r.x == doctest::Approx(0).epsilon(1e-12));
  CHECK(r.y == doctest::Approx(1));
}

TEST_CASE("normalize_orientation") {
  const FaceRecord f = synthetic(0);
  const auto [same, id] = normalize_orientation(f);
  CHECK(id.rotation_deg == 0.0);
  CHECK(same.right.sclera == f.right.sclera);

  const FaceRecord rotated = synthetic(0, 10.0);
  const auto [upright, tf] = normalize_orientation(rotated);
  const FacialAxis a = axis_from_landmarks(upright.landmarks.nasion, upright.landmarks.hairline_mid);
  const double off = std::atan2(a.direction.x, -a.direction.y) * 180.0 / std::numbers::pi;
  CHECK(std::fabs(off) < 0.5);
  CHECK(tf.rotation_deg == doctest::Approx(-10.0).epsilon(1e-9));

  const auto [twice, tf2] = normalize_orientation(upright);
  CHECK(std::fabs(tf2.rotation_deg) < 0.1);
}

TEST_CASE("split_midline") {
  FaceRecord f;
  f.width = 256;
  f.height = 120;
  f.right = testing::make_eye(EyeSide::Right, 256, 120, 80, 60, 30, 12, 80, 60, 10);
  f.left = testing::make_eye(EyeSide::Left, 256, 120, 175, 60, 30, 12, 175, 60, 10);
  f.landmarks = {{127.5, 110}, {127.5, 5}};
  const MidlineSplit s = split_midline(f);
  CHECK(s.midline_x == 127.5);
  CHECK(s.split_column == 128);
  CHECK(s.right.width() == 128);
  CHECK(s.left.origin == Point{128, 0});
  // The halves of a symmetric face are mirror images.
  CHECK(flip_x(s.right.sclera) == s.left.sclera);

  f.left.iris = RasterMask(256, 120, MaskClass::Iris);
  CHECK(split_midline(f).midline_x == 128.0);
  f.width = 300;
  for (EyeRecord* e : {&f.right, &f.left}) {
    e->sclera = RasterMask(300, 120);
    e->iris = RasterMask(300, 120, MaskClass::Iris);
    e->brow = RasterMask(300, 120, MaskClass::Brow);
  }
  CHECK(split_midline(f).midline_x == 150.0);
}

TEST_CASE("measurements are mirror invariant") {
  for (std::size_t i = 0; i < 6; ++i) {
    const FaceRecord f = synthetic(i);
    const MeasurementSet a = measure_face(f).px;
    const MeasurementSet b = measure_face(mirror(f)).px;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      REQUIRE(a.valid(k) == b.valid(mirror_feature_index(k)));
      if (a.valid(k)) CHECK(a.value(k) == doctest::Approx(b.value(mirror_feature_index(k))).epsilon(1e-9));
    }
  }
}

TEST_CASE("measurements are translation invariant") {
  for (std::size_t i = 0; i < 4; ++i) {
    const FaceRecord f = synthetic(i);
    const MeasurementSet a = measure_face(f).px;
    const MeasurementSet b = measure_face(translate(f, 3, -5)).px;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      REQUIRE(a.valid(k) == b.valid(k));
      if (a.valid(k)) CHECK(a.value(k) == doctest::Approx(b.value(k)).epsilon(1e-9));
    }
  }
}
