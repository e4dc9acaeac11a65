#include <random>

#include "doctest.h"
#include "maskgeom.hpp"
#include "support.hpp"

using namespace periorbital;
using testing::rect;

namespace {

double dice_oracle(const RasterMask& x, const RasterMask& y) {
  long inter = 0, nx = 0, ny = 0;
  for (int r = 0; r < x.height(); ++r)
    for (int c = 0; c < x.width(); ++c) {
      nx += x.at(c, r);
      ny += y.at(c, r);
      inter += x.at(c, r) && y.at(c, r);
    }
  if (nx + ny == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(nx + ny);
}

}  // namespace

TEST_CASE("dice examples") {
  const RasterMask a = rect(10, 10, 2, 2, 3, 3);
  CHECK(dice(a, a) == 1.0);
  CHECK(dice(a, rect(10, 10, 6, 6, 7, 7)) == 0.0);
  CHECK(dice(a, rect(10, 10, 3, 2, 4, 3)) == 0.5);
  CHECK(dice(RasterMask(4, 4), RasterMask(4, 4)) == 1.0);
  CHECK_THROWS_AS(dice(RasterMask(4, 4), RasterMask(5, 4)), Error);
}

TEST_CASE("dice matches the pixel-count oracle on random pairs") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
    const double px = 0.05 + 0.9 * static_cast<double>(rng() % 100) / 100.0;
    const double py = 0.05 + 0.9 * static_cast<double>(rng() % 100) / 100.0;
    const RasterMask x = testing::random_mask(rng, w, h, px);
    const RasterMask y = testing::random_mask(rng, w, h, py);
    CHECK(dice(x, y) == dice_oracle(x, y));
    CHECK(dice(x, y) == dice(y, x));
    CHECK(dice(x, x) == 1.0);
  }
}

TEST_CASE("bbox") {
  RasterMask m(10, 12);
  m.set(3, 7);
  CHECK(bbox(m) == BBox{3, 7, 3, 7});
  CHECK(bbox(rect(6, 5, 0, 0, 5, 4)) == BBox{0, 0, 5, 4});
  RasterMask two(10, 12);
  two.set(1, 2);
  two.set(5, 9);
  CHECK(bbox(two) == BBox{1, 2, 5, 9});
  CHECK_THROWS_AS(bbox(RasterMask(3, 3)), Error);
}

TEST_CASE("largest_component") {
  const RasterMask blob = rect(20, 20, 2, 2, 6, 3);  // 10 px
  CHECK(largest_component(blob) == blob);
  RasterMask speck = blob;
  speck.set(15, 15);
  CHECK(largest_component(speck) == blob);
  // Equal blobs: the higher one wins regardless of column.
  RasterMask pair = rect(20, 20, 12, 2, 13, 3);
  const RasterMask low = rect(20, 20, 1, 10, 2, 11);
  for (int y = 10; y <= 11; ++y)
    for (int x = 1; x <= 2; ++x) pair.set(x, y);
  CHECK(largest_component(pair) == rect(20, 20, 12, 2, 13, 3));
  // Diagonal neighbors are connected.
  RasterMask diag(5, 5);
  diag.set(0, 0);
  diag.set(1, 1);
  diag.set(2, 2);
  CHECK(largest_component(diag).count() == 3);
}

TEST_CASE("fit_iris") {
  const RasterMask c = testing::disc(100, 100, 50, 50, 20);
  const IrisFit f = fit_iris(c);
  CHECK(f.center == Point{50, 50});
  CHECK(testing::near(f.diameter_px, 41, 1));
  RasterMask one(5, 5);
  one.set(2, 3);
  CHECK(fit_iris(one).diameter_px == 1.0);
  CHECK(fit_iris(one).center == Point{2, 3});
  // Upper half occluded: width stays, center is the bbox center.
  RasterMask half = c;
  for (int y = 0; y < 50; ++y)
    for (int x = 0; x < 100; ++x) half.set(x, y, false);
  const IrisFit h = fit_iris(half);
  CHECK(h.diameter_px == f.diameter_px);
  const BBox b = bbox(half);
  CHECK(h.center == Point{0.5 * (b.min_x + b.max_x), 0.5 * (b.min_y + b.max_y)});
}

TEST_CASE("canthi") {
  const RasterMask bar = rect(50, 20, 5, 10, 40, 10);
  const Canthi r = canthi(bar, EyeSide::Right);
  CHECK(r.medial == Point{40, 10});
  CHECK(r.lateral == Point{5, 10});
  const Canthi l = canthi(bar, EyeSide::Left);
  CHECK(l.medial == Point{5, 10});
  CHECK(l.lateral == Point{40, 10});
  RasterMask tall = bar;
  tall.set(40, 8);
  tall.set(40, 9);
  CHECK(canthi(tall, EyeSide::Right).medial == Point{40, 9});
}

TEST_CASE("fit_quartic recovers an exact quartic") {
  std::vector<double> x, y;
  for (int i = -10; i <= 10; ++i) {
    x.push_back(i);
    y.push_back(static_cast<double>(i * i));
  }
  const MarginPoly p(fit_quartic(x, y, 0.0, 10.0), 0.0, 10.0, -10, 10, Margin::Superior);
  const auto c = p.coefficients();
  CHECK(std::fabs(c[0]) < 1e-6);
  CHECK(std::fabs(c[1]) < 1e-6);
  CHECK(std::fabs(c[2] - 1.0) < 1e-6);
  CHECK(std::fabs(c[3]) < 1e-6);
  CHECK(std::fabs(c[4]) < 1e-6);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::fabs(p(x[i]) - y[i]) < 1e-6);
}

TEST_CASE("fit_margins on rectangles and ellipses") {
  const Margins r = fit_margins(rect(60, 40, 10, 12, 50, 25));
  for (double x : {10.0, 30.0, 50.0}) {
    CHECK(r.superior(x) == doctest::Approx(11.5));
    CHECK(r.inferior(x) == doctest::Approx(25.5));
  }
  const Margins e = fit_margins(testing::ellipse(140, 80, 70, 40, 50, 20));
  CHECK(testing::near(e.superior(70), 20.0, 0.5));
  CHECK(testing::near(e.inferior(70), 60.0, 0.5));
  CHECK_THROWS_AS(fit_margins(rect(60, 40, 10, 10, 12, 20)), Error);
}
