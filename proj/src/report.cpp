#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace periorbital {

namespace {

constexpr double kWidth = 480, kHeight = 360;
constexpr double kLeft = 64, kRight = 20, kTop = 36, kBottom = 52;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  return s == "-0.000" ? "0.000" : s;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo, hi;
  // Pads by 5% and widens degenerate ranges to one unit.
  void pad() {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

}  // namespace

std::string bland_altman_svg(const AgreementReport& r, const std::string& title) {
  Range xr{0.0, 0.0}, yr{r.loa_low, r.loa_high};
  if (!r.points.empty()) {
    xr = {r.points.front()[0], r.points.front()[0]};
    for (const auto& p : r.points) {
      xr.lo = std::min(xr.lo, p[0]);
      xr.hi = std::max(xr.hi, p[0]);
      yr.lo = std::min(yr.lo, p[1]);
      yr.hi = std::max(yr.hi, p[1]);
    }
  }
  yr.lo = std::min(yr.lo, 0.0);
  yr.hi = std::max(yr.hi, 0.0);
  xr.pad();
  yr.pad();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << escape_xml(title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Axis extremes as tick labels.
  o << "<text x=\"" << kLeft << "\" y=\"" << kTop + ph + 14 << "\" text-anchor=\"start\">" << num(xr.lo) << "</text>\n";
  o << "<text x=\"" << kLeft + pw << "\" y=\"" << kTop + ph + 14 << "\" text-anchor=\"end\">" << num(xr.hi)
    << "</text>\n";
  o << "<text x=\"" << kLeft - 4 << "\" y=\"" << kTop + ph << "\" text-anchor=\"end\">" << num(yr.lo) << "</text>\n";
  o << "<text x=\"" << kLeft - 4 << "\" y=\"" << kTop + 10 << "\" text-anchor=\"end\">" << num(yr.hi) << "</text>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\">mean of prediction and reference</text>\n";
  o << "<text transform=\"translate(14," << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">prediction - reference</text>\n";

  const auto hline = [&](double y, const char* dash, const std::string& label) {
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
      << num(sy(y)) << "\" stroke=\"#444\"" << dash << "/>\n";
    o << "<text x=\"" << num(kLeft + pw - 4) << "\" y=\"" << num(sy(y) - 3) << "\" text-anchor=\"end\" fill=\"#444\">"
      << escape_xml(label) << "</text>\n";
  };
  hline(r.mean_diff, "", "mean " + num(r.mean_diff));
  hline(r.loa_high, " stroke-dasharray=\"6 4\"", "+1.96 SD " + num(r.loa_high));
  hline(r.loa_low, " stroke-dasharray=\"6 4\"", "-1.96 SD " + num(r.loa_low));

  for (const auto& p : r.points)
    o << "<circle cx=\"" << num(sx(p[0])) << "\" cy=\"" << num(sy(p[1])) << "\" r=\"2.5\" fill=\"#1f5fa8\" "
      << "fill-opacity=\"0.6\"/>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace periorbital
