#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "maskgeom.hpp"
#include "prep.hpp"

namespace periorbital {

// A measured value plus whether it was clamped at zero because a lid
// crossed the reference point.
struct Reading {
  std::optional<double> value;
  bool clamped = false;
};

// Cleaned masks and fitted primitives for one eye, in the record's local
// frame. Add `origin` to move a point into the face frame.
struct EyeGeometry {
  EyeSide side = EyeSide::Right;
  Point origin;
  RasterMask fissure;  // largest component of sclera ∪ iris
  RasterMask iris;     // largest iris component
  RasterMask brow;     // largest brow component
  std::size_t sclera_area = 0;
  std::size_t iris_area = 0;
  std::optional<IrisFit> iris_fit;
  std::optional<Canthi> canthi;
  std::optional<Margins> margins;

  Point to_face(Point local) const noexcept { return Point{local.x + origin.x, local.y + origin.y}; }
};

EyeGeometry analyze_eye(const EyeRecord& eye);

enum class MrdKind { Mrd1 = 1, Mrd2 = 2 };

Reading mrd(const EyeGeometry& eye, MrdKind which);
Reading scleral_show(const EyeGeometry& eye, Margin which);

struct Fissure {
  std::optional<double> vpf;
  std::optional<double> hpf;
};
Fissure palpebral_fissure(const EyeGeometry& eye);

struct Intercanthal {
  std::optional<double> icd;
  std::optional<double> ocd;
  std::optional<double> ipd;
};
Intercanthal intercanthal(const EyeGeometry& right, const EyeGeometry& left);

// Signed angle in degrees between the medial→lateral canthal line and the
// facial horizontal through the medial canthus; positive when the lateral
// canthus sits superior to the medial one.
std::optional<double> canthal_tilt(const EyeGeometry& eye, const FacialAxis& axis);
std::optional<double> canthal_tilt(Point medial, Point lateral, const FacialAxis& axis);

// Distance between the projections of both medial canthi onto the facial axis.
std::optional<double> vertical_dystopia(const EyeGeometry& right, const EyeGeometry& left, const FacialAxis& axis);
double vertical_dystopia(Point right_medial, Point left_medial, const FacialAxis& axis);

struct CanthalHeights {
  std::optional<double> right_medial, right_lateral, left_medial, left_lateral;
};
// Perpendicular distance from each canthus to the line through both iris
// centers, positive above the line.
CanthalHeights canthal_heights(const EyeGeometry& right, const EyeGeometry& left);
std::optional<double> signed_height_above_line(Point p, Point a, Point b);

// Order: sup_medial, sup_central, sup_lateral, inf_medial, inf_central, inf_lateral.
std::array<std::optional<double>, 6> brow_heights(const EyeGeometry& eye);

std::optional<double> scleral_area_ratio(const EyeGeometry& eye);

struct FaceMeasurement {
  MeasurementSet px{Units::Px};
  MeasurementSet mm{Units::Mm};
  std::optional<Scale> right_scale;
  std::optional<Scale> left_scale;
  // Human-readable flags, e.g. clamped readings.
  std::vector<std::string> notes;
};

// Measures every feature. Never throws on missing anatomy; unmeasurable
// features are left invalid.
FaceMeasurement measure_face(const FaceRecord& face);

}  // namespace periorbital
