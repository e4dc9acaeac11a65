#include "maskgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace periorbital {

double dice(const RasterMask& x, const RasterMask& y) {
  if (x.width() != y.width() || x.height() != y.height())
    throw Error(ErrorCode::DimensionMismatch, "dice: masks differ in size");
  std::size_t both = 0, nx = 0, ny = 0;
  const auto& a = x.bits();
  const auto& b = y.bits();
  for (std::size_t i = 0; i < a.size(); ++i) {
    nx += a[i];
    ny += b[i];
    both += a[i] & b[i];
  }
  if (nx + ny == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(nx + ny);
}

BBox bbox(const RasterMask& mask) {
  BBox box{mask.width(), mask.height(), -1, -1};
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.at(x, y)) {
        box.min_x = std::min(box.min_x, x);
        box.min_y = std::min(box.min_y, y);
        box.max_x = std::max(box.max_x, x);
        box.max_y = std::max(box.max_y, y);
      }
  if (box.max_x < 0) throw Error(ErrorCode::EmptyMask, "bbox of an empty mask");
  return box;
}

RasterMask largest_component(const RasterMask& mask) {
  const int w = mask.width(), h = mask.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  struct Component {
    std::size_t size = 0;
    BBox box;
  };
  std::vector<Component> comps;
  std::vector<std::pair<int, int>> stack;

  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      if (!mask.at(x0, y0) || label[static_cast<std::size_t>(y0) * w + x0] >= 0) continue;
      const int id = static_cast<int>(comps.size());
      Component c{0, BBox{x0, y0, x0, y0}};
      stack.assign(1, {x0, y0});
      label[static_cast<std::size_t>(y0) * w + x0] = id;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++c.size;
        c.box.min_x = std::min(c.box.min_x, x);
        c.box.min_y = std::min(c.box.min_y, y);
        c.box.max_x = std::max(c.box.max_x, x);
        c.box.max_y = std::max(c.box.max_y, y);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (!mask.test(nx, ny)) continue;
            auto& l = label[static_cast<std::size_t>(ny) * w + nx];
            if (l >= 0) continue;
            l = id;
            stack.emplace_back(nx, ny);
          }
      }
      comps.push_back(c);
    }
  if (comps.empty()) throw Error(ErrorCode::EmptyMask, "largest_component of an empty mask");

  std::size_t best = 0;
  for (std::size_t i = 1; i < comps.size(); ++i) {
    const auto& a = comps[i];
    const auto& b = comps[best];
    if (a.size != b.size) {
      if (a.size > b.size) best = i;
    } else if (std::pair(a.box.min_y, a.box.min_x) < std::pair(b.box.min_y, b.box.min_x)) {
      best = i;
    }
  }

  RasterMask out(w, h, mask.class_label());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (label[static_cast<std::size_t>(y) * w + x] == static_cast<int>(best)) out.set(x, y);
  return out;
}

IrisFit fit_iris(const RasterMask& iris) {
  if (iris.empty()) throw Error(ErrorCode::EmptyMask, "fit_iris: empty iris mask");
  const BBox b = bbox(iris);
  return IrisFit{Point{0.5 * (b.min_x + b.max_x), 0.5 * (b.min_y + b.max_y)}, static_cast<double>(b.width())};
}

namespace {

double column_median_y(const RasterMask& m, int x) {
  std::vector<int> ys;
  for (int y = 0; y < m.height(); ++y)
    if (m.at(x, y)) ys.push_back(y);
  const std::size_t n = ys.size();
  return n % 2 ? ys[n / 2] : 0.5 * (ys[n / 2 - 1] + ys[n / 2]);
}

}  // namespace

Canthi canthi(const RasterMask& fissure, EyeSide side) {
  const BBox b = bbox(fissure);
  const Point low{static_cast<double>(b.min_x), column_median_y(fissure, b.min_x)};
  const Point high{static_cast<double>(b.max_x), column_median_y(fissure, b.max_x)};
  // Medial is the extreme toward the image midline.
  return medial_sign(side) > 0 ? Canthi{high, low} : Canthi{low, high};
}

MarginPoly::MarginPoly(std::array<double, 5> scaled_coeffs, double center, double half_range, double x_min,
                       double x_max, Margin which)
    : c_(scaled_coeffs), center_(center), half_range_(half_range), x_min_(x_min), x_max_(x_max), which_(which) {
  for (double c : c_)
    if (!std::isfinite(c)) throw Error(ErrorCode::Degenerate, "margin polynomial has non-finite coefficients");
}

double MarginPoly::operator()(double x) const {
  if (!in_domain(x)) throw Error(ErrorCode::OutOfBounds, "margin polynomial evaluated outside its domain");
  const double t = (x - center_) / half_range_;
  return (((c_[4] * t + c_[3]) * t + c_[2]) * t + c_[1]) * t + c_[0];
}

std::array<double, 5> MarginPoly::coefficients() const {
  // p(x) = sum_k c_k ((x - m)/s)^k, expanded binomially.
  static constexpr int binom[5][5] = {{1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  std::array<double, 5> raw{};
  for (int k = 0; k < 5; ++k) {
    const double ck = c_[k] / std::pow(half_range_, k);
    for (int j = 0; j <= k; ++j) raw[j] += ck * binom[k][j] * std::pow(-center_, k - j);
  }
  return raw;
}

std::array<double, 5> fit_quartic(const std::vector<double>& x, const std::vector<double>& y, double center,
                                  double half_range) {
  constexpr int n = 5;
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "fit_quartic: x/y size mismatch");
  std::vector<double> distinct(x);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < n) throw Error(ErrorCode::Degenerate, "fit_quartic: fewer than 5 distinct abscissae");

  // Normal equations A^T A c = A^T y over the scaled abscissa.
  std::array<double, 2 * n - 1> moments{};
  std::array<double, n> rhs{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = (x[i] - center) / half_range;
    double p = 1.0;
    for (int k = 0; k < 2 * n - 1; ++k) {
      moments[k] += p;
      if (k < n) rhs[k] += p * y[i];
      p *= t;
    }
  }
  std::array<std::array<double, n + 1>, n> m{};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m[r][c] = moments[r + c];
    m[r][n] = rhs[r];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-300) throw Error(ErrorCode::Degenerate, "fit_quartic: singular system");
    std::swap(m[col], m[piv]);
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, n> coef{};
  for (int r = n - 1; r >= 0; --r) {
    double s = m[r][n];
    for (int c = r + 1; c < n; ++c) s -= m[r][c] * coef[c];
    coef[r] = s / m[r][r];
  }
  return coef;
}

Margins fit_margins(const RasterMask& fissure) {
  std::vector<double> xs, sup, inf;
  for (int x = 0; x < fissure.width(); ++x) {
    int lo = -1, hi = -1;
    for (int y = 0; y < fissure.height(); ++y)
      if (fissure.at(x, y)) {
        if (lo < 0) lo = y;
        hi = y;
      }
    if (lo < 0) continue;
    xs.push_back(x);
    sup.push_back(lo - 0.5);
    inf.push_back(hi + 0.5);
  }
  if (xs.size() < 5) throw Error(ErrorCode::Degenerate, "fit_margins: need at least 5 occupied columns");
  const double center = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double half_range = std::max(1.0, 0.5 * (xs.back() - xs.front()));
  const double x_min = xs.front(), x_max = xs.back();
  return Margins{
      MarginPoly(fit_quartic(xs, sup, center, half_range), center, half_range, x_min, x_max, Margin::Superior),
      MarginPoly(fit_quartic(xs, inf, center, half_range), center, half_range, x_min, x_max, Margin::Inferior),
  };
}

}  // namespace periorbital
