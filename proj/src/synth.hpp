#pragma once

#include <cstdint>
#include <vector>

#include "core.hpp"

namespace periorbital {

// Parabolic brow band: top edge y = peak_y + curvature * (x - peak_x)^2,
// bottom edge thickness below it, spanning x in [x_min, x_max] (absolute).
struct BrowParams {
  double peak_x = 0.0;
  double peak_y = 0.0;
  double curvature = 0.0;
  double thickness = 10.0;
  double x_min = 0.0;
  double x_max = 0.0;
};

struct EyeParams {
  Point center;            // fissure ellipse center
  double semi_major = 45;  // horizontal semi-axis before tilt
  double semi_minor = 14;  // vertical semi-axis before tilt
  double iris_radius = 16.5;
  Point iris_offset;       // iris center relative to the fissure center
  double tilt_deg = 0.0;   // positive raises the lateral end
  BrowParams brow;
  bool has_brow = true;

  Point iris_center() const noexcept { return Point{center.x + iris_offset.x, center.y + iris_offset.y}; }
};

struct FaceParams {
  EyeParams right;  // image-left
  EyeParams left;   // image-right
  Point nasion;
  Point hairline_mid;
  double rotation_deg = 0.0;  // whole-face rotation about the nasion
  int width = 400;
  int height = 260;
  std::string id = "synthetic";
};

struct RenderedFace {
  FaceRecord face;
  // Closed-form values for the unrotated face. Quantities defined on pixel
  // columns (canthi and brow extremes) are evaluated on the integer lattice;
  // lid margins and iris extents use the continuous shapes.
  MeasurementSet truth_px{Units::Px};
  MeasurementSet truth_mm{Units::Mm};
};

// Fissure = ellipse; iris = disc clipped to the ellipse; sclera = ellipse
// minus disc; brow = parabolic band. Throws when a shape leaves the image or
// the iris is clipped horizontally.
RenderedFace render_face(const FaceParams& params);

// Analytic truth only (no rasterization).
MeasurementSet analytic_measurements(const FaceParams& params);

enum class Phenotype { Healthy, Disease };

// Healthy faces draw from fixed baseline ranges. Disease faces widen the
// fissure by 25%, lift the iris (exposing inferior sclera), flatten or invert
// the canthal tilt and add vertical dystopia. Not clinically calibrated.
FaceParams sample_face_params(Phenotype phenotype, std::uint64_t seed, std::size_t index);

struct SyntheticFace {
  RenderedFace rendered;
  Phenotype phenotype = Phenotype::Healthy;
};

// Throws InvalidArgument for n == 0. Face i uses sample_face_params(phenotype, seed, i).
std::vector<SyntheticFace> gen_population(std::size_t n, Phenotype phenotype, std::uint64_t seed,
                                          unsigned threads = 0);

}  // namespace periorbital
