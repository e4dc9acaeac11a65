#include "synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>

#include "anthro.hpp"
#include "parallel.hpp"
#include "prep.hpp"
#include "seed.hpp"

namespace periorbital {

namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

std::optional<std::pair<double, double>> solve_quadratic(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  return std::pair<double, double>{(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)};
}

struct Ellipse {
  Point c;
  double a, b, cs, sn;

  Ellipse(const EyeParams& e, EyeSide side)
      : c(e.center), a(e.semi_major), b(e.semi_minor) {
    const double phi = medial_sign(side) * e.tilt_deg * kRadPerDeg;
    cs = std::cos(phi);
    sn = std::sin(phi);
  }

  double level(double x, double y) const noexcept {
    const double dx = x - c.x, dy = y - c.y;
    const double u = (dx * cs + dy * sn) / a;
    const double v = (-dx * sn + dy * cs) / b;
    return u * u + v * v;
  }
  bool contains(double x, double y) const noexcept { return level(x, y) <= 1.0; }

  // y-interval inside the ellipse on column x.
  std::optional<std::pair<double, double>> column(double x) const {
    const double X = x - c.x;
    const double k = 1.0 / (a * a) - 1.0 / (b * b);
    const auto r = solve_quadratic(sn * sn / (a * a) + cs * cs / (b * b), 2.0 * X * cs * sn * k,
                                   X * X * (cs * cs / (a * a) + sn * sn / (b * b)) - 1.0);
    if (!r) return std::nullopt;
    return std::pair<double, double>{c.y + r->first, c.y + r->second};
  }
  // x-interval inside the ellipse on row y.
  std::optional<std::pair<double, double>> row(double y) const {
    const double Y = y - c.y;
    const double k = 1.0 / (a * a) - 1.0 / (b * b);
    const auto r = solve_quadratic(cs * cs / (a * a) + sn * sn / (b * b), 2.0 * Y * cs * sn * k,
                                   Y * Y * (sn * sn / (a * a) + cs * cs / (b * b)) - 1.0);
    if (!r) return std::nullopt;
    return std::pair<double, double>{c.x + r->first, c.x + r->second};
  }
  double half_width() const noexcept { return std::sqrt(a * a * cs * cs + b * b * sn * sn); }
  double half_height() const noexcept { return std::sqrt(a * a * sn * sn + b * b * cs * cs); }
  // Topmost (smallest y) and bottommost points.
  Point extreme(bool top) const noexcept {
    const double r = half_height();
    const double dx = (a * a - b * b) * sn * cs / r;
    return top ? Point{c.x - dx, c.y - r} : Point{c.x + dx, c.y + r};
  }
};

struct Disc {
  Point c;
  double r;
  bool contains(double x, double y) const noexcept {
    const double dx = x - c.x, dy = y - c.y;
    return dx * dx + dy * dy <= r * r;
  }
};

struct Brow {
  BrowParams p;
  double top(double x) const noexcept { return p.peak_y + p.curvature * (x - p.peak_x) * (x - p.peak_x); }
  bool contains(double x, double y) const noexcept {
    if (x < p.x_min || x > p.x_max) return false;
    const double t = top(x);
    return y >= t && y <= t + p.thickness;
  }
};

// Integer column range touched by a chord, empty when no lattice row falls inside.
std::optional<std::pair<int, int>> lattice_rows(double lo, double hi) {
  const double a = std::ceil(lo), b = std::floor(hi);
  if (a > b) return std::nullopt;
  return std::pair<int, int>{static_cast<int>(a), static_cast<int>(b)};
}

struct EyeTruth {
  Point medial, lateral;
  Point iris_center;
  double iris_diameter = 0.0;
  double mrd1 = 0.0, mrd2 = 0.0, sss = 0.0, iss = 0.0;
  double ratio = 0.0;
  std::array<std::optional<double>, 6> brow{};
};

// Canthus on the extreme lattice column of the fissure, at the median row.
Point lattice_canthus(const Ellipse& e, int direction) {
  const double hw = e.half_width();
  int x = direction > 0 ? static_cast<int>(std::floor(e.c.x + hw)) : static_cast<int>(std::ceil(e.c.x - hw));
  for (int guard = 0; guard < 100000; ++guard, x -= direction) {
    const auto ch = e.column(x);
    if (!ch) continue;
    if (const auto rows = lattice_rows(ch->first, ch->second))
      return Point{static_cast<double>(x), 0.5 * (rows->first + rows->second)};
  }
  throw Error(ErrorCode::Degenerate, "fissure covers no pixel");
}

// Vertical extent of disc ∩ ellipse: the extreme is a disc pole inside the
// ellipse, an ellipse pole inside the disc, or a boundary crossing.
std::pair<double, double> visible_iris_rows(const Ellipse& e, const Disc& d) {
  std::vector<Point> cand;
  for (const Point p : {Point{d.c.x, d.c.y - d.r}, Point{d.c.x, d.c.y + d.r}})
    if (e.contains(p.x, p.y)) cand.push_back(p);
  for (const bool top : {true, false}) {
    const Point p = e.extreme(top);
    if (d.contains(p.x, p.y)) cand.push_back(p);
  }
  const auto g = [&](double t) { return e.level(d.c.x + d.r * std::cos(t), d.c.y + d.r * std::sin(t)) - 1.0; };
  constexpr int kSteps = 7200;
  const double step = 2.0 * std::numbers::pi / kSteps;
  for (int i = 0; i < kSteps; ++i) {
    double t0 = i * step, t1 = t0 + step;
    double g0 = g(t0), g1 = g(t1);
    if ((g0 > 0.0) == (g1 > 0.0)) continue;
    for (int it = 0; it < 80; ++it) {
      const double tm = 0.5 * (t0 + t1);
      const double gm = g(tm);
      if ((gm > 0.0) == (g0 > 0.0)) {
        t0 = tm;
        g0 = gm;
      } else {
        t1 = tm;
      }
    }
    const double t = 0.5 * (t0 + t1);
    cand.push_back(Point{d.c.x + d.r * std::cos(t), d.c.y + d.r * std::sin(t)});
  }
  if (cand.empty()) throw Error(ErrorCode::Degenerate, "iris lies outside the fissure");
  double lo = cand.front().y, hi = cand.front().y;
  for (const Point& p : cand) {
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
  }
  return {lo, hi};
}

// Overlap area of disc and ellipse by midpoint quadrature over columns.
double overlap_area(const Ellipse& e, const Disc& d) {
  constexpr int kSteps = 20000;
  const double h = 2.0 * d.r / kSteps;
  double area = 0.0;
  for (int i = 0; i < kSteps; ++i) {
    const double x = d.c.x - d.r + (i + 0.5) * h;
    const double dx = x - d.c.x;
    const double half = std::sqrt(std::max(0.0, d.r * d.r - dx * dx));
    const auto ch = e.column(x);
    if (!ch) continue;
    const double lo = std::max(d.c.y - half, ch->first);
    const double hi = std::min(d.c.y + half, ch->second);
    if (hi > lo) area += (hi - lo) * h;
  }
  return area;
}

EyeTruth eye_truth(const EyeParams& p, EyeSide side) {
  const Ellipse e(p, side);
  const Disc d{p.iris_center(), p.iris_radius};
  EyeTruth t;
  t.medial = lattice_canthus(e, medial_sign(side));
  t.lateral = lattice_canthus(e, -medial_sign(side));

  // Horizontal iris extent in whole pixels, as a bounding box sees it.
  int min_x = 0, max_x = -1;
  bool any = false;
  for (int y = static_cast<int>(std::ceil(d.c.y - d.r)); y <= static_cast<int>(std::floor(d.c.y + d.r)); ++y) {
    const double dy = y - d.c.y;
    const double half = std::sqrt(std::max(0.0, d.r * d.r - dy * dy));
    const auto ch = e.row(y);
    if (!ch) continue;
    const auto cols = lattice_rows(std::max(d.c.x - half, ch->first), std::min(d.c.x + half, ch->second));
    if (!cols) continue;
    min_x = any ? std::min(min_x, cols->first) : cols->first;
    max_x = any ? std::max(max_x, cols->second) : cols->second;
    any = true;
  }
  if (!any) throw Error(ErrorCode::Degenerate, "iris covers no pixel");
  t.iris_diameter = max_x - min_x + 1;
  const auto [top, bottom] = visible_iris_rows(e, d);
  t.iris_center = Point{0.5 * (min_x + max_x), 0.5 * (top + bottom)};

  const auto lids = e.column(t.iris_center.x);
  if (!lids) throw Error(ErrorCode::Degenerate, "iris center outside the fissure");
  // Scleral show uses the drawn radius; population radii sit on k + 0.5, where
  // this equals half the lattice width.
  const double r = p.iris_radius;
  t.mrd1 = std::max(0.0, t.iris_center.y - lids->first);
  t.mrd2 = std::max(0.0, lids->second - t.iris_center.y);
  t.sss = std::max(0.0, (t.iris_center.y - r) - lids->first);
  t.iss = std::max(0.0, lids->second - (t.iris_center.y + r));

  const double iris_area = overlap_area(e, d);
  t.ratio = (std::numbers::pi * e.a * e.b - iris_area) / iris_area;

  if (p.has_brow) {
    const Brow brow{p.brow};
    const std::array<Point, 3> refs = {t.medial, t.iris_center, t.lateral};
    for (std::size_t i = 0; i < 3; ++i) {
      const double x = refs[i].x;
      if (x < p.brow.x_min || x > p.brow.x_max) continue;
      const double top_edge = brow.top(x);
      const auto rows = lattice_rows(top_edge, top_edge + p.brow.thickness);
      if (!rows) continue;
      t.brow[i] = refs[i].y - rows->first;
      t.brow[i + 3] = refs[i].y - rows->second;
    }
  }
  return t;
}

double height_above(Point p, Point a, Point b) {
  const auto h = signed_height_above_line(p, a, b);
  if (!h) throw Error(ErrorCode::Degenerate, "iris centers coincide");
  return *h;
}

void check_params(const FaceParams& f) {
  if (f.width < 1 || f.height < 1) throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  for (const auto* e : {&f.right, &f.left}) {
    if (!(e->semi_major > 0.0 && e->semi_minor > 0.0 && e->iris_radius > 0.0))
      throw Error(ErrorCode::InvalidArgument, "eye axes and iris radius must be positive");
    if (e->has_brow && (!(e->brow.thickness > 0.0) || e->brow.x_max < e->brow.x_min))
      throw Error(ErrorCode::InvalidArgument, "brow band is empty");
  }
  if (!(f.nasion.y > f.hairline_mid.y)) throw Error(ErrorCode::InvalidArgument, "hairline must lie above the nasion");
  if (!(f.right.center.x < f.nasion.x && f.left.center.x > f.nasion.x))
    throw Error(ErrorCode::InvalidArgument, "right eye must be image-left of the nasion and left eye image-right");
  for (const EyeSide side : {EyeSide::Right, EyeSide::Left}) {
    const EyeParams& p = side == EyeSide::Right ? f.right : f.left;
    const Ellipse e(p, side);
    const Point c = p.iris_center();
    if (!e.contains(c.x - p.iris_radius - 1.0, c.y) || !e.contains(c.x + p.iris_radius + 1.0, c.y))
      throw Error(ErrorCode::InvalidArgument, "iris must not touch the canthal ends of the fissure");
  }
}

struct Shape {
  double x0, y0, x1, y1;  // canonical bounding box
};

Shape ellipse_box(const Ellipse& e) {
  const double hw = e.half_width(), hh = e.half_height();
  return {e.c.x - hw, e.c.y - hh, e.c.x + hw, e.c.y + hh};
}

Shape brow_box(const BrowParams& b) {
  const Brow brow{b};
  double lo = std::min(brow.top(b.x_min), brow.top(b.x_max));
  double hi = std::max(brow.top(b.x_min), brow.top(b.x_max));
  if (b.peak_x >= b.x_min && b.peak_x <= b.x_max) {
    lo = std::min(lo, brow.top(b.peak_x));
    hi = std::max(hi, brow.top(b.peak_x));
  }
  return {b.x_min, lo, b.x_max, hi + b.thickness};
}

// Pixel range covering a canonical box after the face transform; throws when
// any corner leaves the image.
std::array<int, 4> image_range(const Shape& s, const RigidTransform& tf, int width, int height) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const Point p : {Point{s.x0, s.y0}, Point{s.x1, s.y0}, Point{s.x0, s.y1}, Point{s.x1, s.y1}}) {
    const Point q = tf.apply(p);
    x0 = std::min(x0, q.x);
    y0 = std::min(y0, q.y);
    x1 = std::max(x1, q.x);
    y1 = std::max(y1, q.y);
  }
  if (x0 < 0.0 || y0 < 0.0 || x1 > width - 1.0 || y1 > height - 1.0)
    throw Error(ErrorCode::OutOfBounds, "synthetic shape leaves the image");
  return {static_cast<int>(std::floor(x0)), static_cast<int>(std::floor(y0)), static_cast<int>(std::ceil(x1)),
          static_cast<int>(std::ceil(y1))};
}

template <class Fn>
void paint(RasterMask& m, const std::array<int, 4>& range, const RigidTransform& tf, Fn inside) {
  for (int y = range[1]; y <= range[3]; ++y)
    for (int x = range[0]; x <= range[2]; ++x) {
      const Point q = tf.invert(Point{static_cast<double>(x), static_cast<double>(y)});
      if (inside(q.x, q.y)) m.set(x, y);
    }
}

EyeRecord render_eye(const EyeParams& p, EyeSide side, const FaceParams& f, const RigidTransform& tf) {
  EyeRecord rec;
  rec.side = side;
  rec.id = f.id;
  rec.sclera = RasterMask(f.width, f.height, MaskClass::Sclera);
  rec.iris = RasterMask(f.width, f.height, MaskClass::Iris);
  rec.brow = RasterMask(f.width, f.height, MaskClass::Brow);
  const Ellipse e(p, side);
  const Disc d{p.iris_center(), p.iris_radius};
  const auto eye_range = image_range(ellipse_box(e), tf, f.width, f.height);
  paint(rec.iris, eye_range, tf, [&](double x, double y) { return e.contains(x, y) && d.contains(x, y); });
  paint(rec.sclera, eye_range, tf, [&](double x, double y) { return e.contains(x, y) && !d.contains(x, y); });
  if (p.has_brow) {
    const Brow brow{p.brow};
    paint(rec.brow, image_range(brow_box(p.brow), tf, f.width, f.height), tf,
          [&](double x, double y) { return brow.contains(x, y); });
  }
  return rec;
}

}  // namespace

MeasurementSet analytic_measurements(const FaceParams& params) {
  check_params(params);
  const EyeTruth r = eye_truth(params.right, EyeSide::Right);
  const EyeTruth l = eye_truth(params.left, EyeSide::Left);
  const FacialAxis axis = axis_from_landmarks(params.nasion, params.hairline_mid);
  MeasurementSet px(Units::Px);
  for (const auto& [side, t] : {std::pair{EyeSide::Right, &r}, std::pair{EyeSide::Left, &l}}) {
    px.set(side, SideFeature::Mrd1, t->mrd1);
    px.set(side, SideFeature::Mrd2, t->mrd2);
    px.set(side, SideFeature::Iss, t->iss);
    px.set(side, SideFeature::Sss, t->sss);
    px.set(side, SideFeature::Vpf, t->mrd1 + t->mrd2);
    px.set(side, SideFeature::Hpf, std::abs(t->medial.x - t->lateral.x));
    px.set(side, SideFeature::MedialCanthalHeight, height_above(t->medial, r.iris_center, l.iris_center));
    px.set(side, SideFeature::LateralCanthalHeight, height_above(t->lateral, r.iris_center, l.iris_center));
    const auto tilt = canthal_tilt(t->medial, t->lateral, axis);
    if (tilt) px.set(side, SideFeature::CanthalTiltDeg, *tilt);
    px.set(side, SideFeature::ScleralAreaRatio, t->ratio);
    for (std::size_t i = 0; i < 6; ++i)
      if (t->brow[i])
        px.set(side, static_cast<SideFeature>(static_cast<std::size_t>(SideFeature::BrowSupMedial) + i), *t->brow[i]);
  }
  px.set(GlobalFeature::Icd, std::abs(l.medial.x - r.medial.x));
  px.set(GlobalFeature::Ipd, std::abs(l.iris_center.x - r.iris_center.x));
  px.set(GlobalFeature::Ocd, std::abs(l.lateral.x - r.lateral.x));
  px.set(GlobalFeature::VerticalDystopia, vertical_dystopia(r.medial, l.medial, axis));
  return px;
}

RenderedFace render_face(const FaceParams& params) {
  RenderedFace out;
  out.truth_px = analytic_measurements(params);
  const RigidTransform tf{params.rotation_deg, params.nasion, Point{0.0, 0.0}};
  FaceRecord& face = out.face;
  face.id = params.id;
  face.width = params.width;
  face.height = params.height;
  face.right = render_eye(params.right, EyeSide::Right, params, tf);
  face.left = render_eye(params.left, EyeSide::Left, params, tf);
  face.landmarks.nasion = tf.apply(params.nasion);
  face.landmarks.hairline_mid = tf.apply(params.hairline_mid);

  const auto scale = [](const EyeParams& p, EyeSide side) {
    return Scale::from_iris_diameter(eye_truth(p, side).iris_diameter);
  };
  out.truth_mm = to_mm(out.truth_px, scale(params.left, EyeSide::Left), scale(params.right, EyeSide::Right));
  return out;
}

FaceParams sample_face_params(Phenotype phenotype, std::uint64_t seed, std::size_t index) {
  const bool disease = phenotype == Phenotype::Disease;
  std::mt19937_64 rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(index) + (disease ? 1 : 0)));
  const auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  FaceParams f;
  f.width = 400;
  f.height = 260;
  f.nasion = Point{200.0 + uniform(-2.0, 2.0), 150.0};
  f.hairline_mid = Point{f.nasion.x, 20.0};
  char id[32];
  std::snprintf(id, sizeof id, "%s_%04zu", disease ? "disease" : "healthy", index);
  f.id = id;

  const double gap = uniform(40.0, 50.0);
  const int iris_half = std::uniform_int_distribution<int>(16, 18)(rng);
  for (const EyeSide side : {EyeSide::Right, EyeSide::Left}) {
    EyeParams& e = side == EyeSide::Right ? f.right : f.left;
    const double lateral = -medial_sign(side);
    e.semi_major = uniform(42.0, 50.0);
    e.semi_minor = uniform(12.5, 15.5) * (disease ? 1.25 : 1.0);
    e.tilt_deg = disease ? uniform(-4.0, 2.0) : uniform(2.0, 7.0);
    e.iris_radius = iris_half + 0.5;
    e.center = Point{f.nasion.x + lateral * (gap + e.semi_major),
                     150.0 + (disease ? uniform(-3.5, 3.5) : uniform(-1.0, 1.0))};
    // Iris centers sit on pixel centers so the horizontal extent is exact.
    const double dx = uniform(-2.0, 2.0);
    const double dy = disease ? uniform(-5.0, -2.5) : uniform(-1.5, 0.5);
    e.iris_offset = Point{std::round(e.center.x + dx) - e.center.x, std::round(e.center.y + dy) - e.center.y};

    BrowParams& b = e.brow;
    b.x_min = e.center.x - e.semi_major - 8.0;
    b.x_max = e.center.x + e.semi_major + 8.0;
    b.peak_x = e.center.x + lateral * uniform(5.0, 15.0);
    b.peak_y = e.center.y - uniform(38.0, 46.0);
    const double reach = std::max(b.peak_x - b.x_min, b.x_max - b.peak_x);
    b.curvature = uniform(6.0, 12.0) / (reach * reach);
    b.thickness = uniform(8.0, 12.0);
  }
  return f;
}

std::vector<SyntheticFace> gen_population(std::size_t n, Phenotype phenotype, std::uint64_t seed,
                                          unsigned threads) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "population size must be at least 1");
  std::vector<SyntheticFace> out(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        out[i].rendered = render_face(sample_face_params(phenotype, seed, i));
        out[i].phenotype = phenotype;
      },
      threads);
  return out;
}

}  // namespace periorbital
