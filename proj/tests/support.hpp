#pragma once

#include <cmath>
#include <random>

#include "core.hpp"

namespace testing {

using namespace periorbital;

inline RasterMask rect(int w, int h, int x0, int y0, int x1, int y1, MaskClass cls = MaskClass::Sclera) {
  RasterMask m(w, h, cls);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) m.set(x, y);
  return m;
}

// Pixels whose centers fall inside the axis-aligned ellipse.
inline RasterMask ellipse(int w, int h, double cx, double cy, double a, double b, MaskClass cls = MaskClass::Sclera) {
  RasterMask m(w, h, cls);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double u = (x - cx) / a, v = (y - cy) / b;
      if (u * u + v * v <= 1.0) m.set(x, y);
    }
  return m;
}

inline RasterMask disc(int w, int h, double cx, double cy, double r, MaskClass cls = MaskClass::Iris) {
  return ellipse(w, h, cx, cy, r, r, cls);
}

inline RasterMask minus(const RasterMask& a, const RasterMask& b) {
  RasterMask m(a.width(), a.height(), a.class_label());
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) m.set(x, y, a.at(x, y) && !b.at(x, y));
  return m;
}

inline RasterMask intersect(const RasterMask& a, const RasterMask& b) {
  RasterMask m(a.width(), a.height(), a.class_label());
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) m.set(x, y, a.at(x, y) && b.at(x, y));
  return m;
}

inline RasterMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
  std::bernoulli_distribution on(density);
  RasterMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, on(rng));
  return m;
}

// Eye record in a w x h frame: fissure ellipse minus iris disc as sclera,
// iris clipped to the fissure.
inline EyeRecord make_eye(EyeSide side, int w, int h, double cx, double cy, double a, double b, double ix, double iy,
                          double r) {
  EyeRecord e;
  e.side = side;
  const RasterMask fissure = ellipse(w, h, cx, cy, a, b);
  const RasterMask iris = intersect(disc(w, h, ix, iy, r), fissure);
  e.sclera = minus(fissure, iris);
  e.iris = iris;
  e.iris.set_class_label(MaskClass::Iris);
  e.brow = RasterMask(w, h, MaskClass::Brow);
  return e;
}

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace testing
