#pragma once

#include <array>
#include <utility>

#include "core.hpp"

namespace periorbital {

// Inclusive pixel bounds.
struct BBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;

  int width() const noexcept { return max_x - min_x + 1; }
  int height() const noexcept { return max_y - min_y + 1; }
  bool contains(const BBox& o) const noexcept {
    return o.min_x >= min_x && o.min_y >= min_y && o.max_x <= max_x && o.max_y <= max_y;
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

// 2|X∩Y| / (|X|+|Y|); two empty masks score 1.
double dice(const RasterMask& x, const RasterMask& y);

BBox bbox(const RasterMask& mask);

// Keeps the largest 8-connected component. Equal sizes resolve to the
// component whose bounding box starts highest, then leftmost.
RasterMask largest_component(const RasterMask& mask);

struct IrisFit {
  Point center;
  double diameter_px = 0.0;
};

// Center is the bounding-box center; diameter is the horizontal extent in
// whole pixels, since the lids routinely occlude the vertical extent.
IrisFit fit_iris(const RasterMask& iris);

struct Canthi {
  Point medial;
  Point lateral;
};

Canthi canthi(const RasterMask& fissure, EyeSide side);

enum class Margin { Superior, Inferior };

// Degree-4 polynomial y = p(x) over an inclusive column domain. Stored in a
// centered and scaled basis; coefficients() expands to powers of raw x.
class MarginPoly {
 public:
  MarginPoly() = default;
  MarginPoly(std::array<double, 5> scaled_coeffs, double center, double half_range, double x_min, double x_max,
             Margin which);

  double operator()(double x) const;
  bool in_domain(double x) const noexcept { return x >= x_min_ && x <= x_max_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  Margin which() const noexcept { return which_; }

  // c0 + c1 x + ... + c4 x^4 in raw pixel x.
  std::array<double, 5> coefficients() const;

 private:
  std::array<double, 5> c_{};
  double center_ = 0.0;
  double half_range_ = 1.0;
  double x_min_ = 0.0;
  double x_max_ = 0.0;
  Margin which_ = Margin::Superior;
};

struct Margins {
  MarginPoly superior;
  MarginPoly inferior;
};

// Lid margins of the palpebral fissure (sclera ∪ iris). Each occupied column
// contributes its outermost pixel edge: top edge (min_y - 0.5) for the
// superior lid and bottom edge (max_y + 0.5) for the inferior lid.
Margins fit_margins(const RasterMask& fissure);

// Least-squares polynomial through (x, y) samples, in the basis
// t = (x - center) / half_range. Requires at least degree+1 distinct x.
std::array<double, 5> fit_quartic(const std::vector<double>& x, const std::vector<double>& y, double center,
                                  double half_range);

}  // namespace periorbital
