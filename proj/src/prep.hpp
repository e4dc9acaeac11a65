#pragma once

#include <utility>

#include "core.hpp"

namespace periorbital {

// The facial vertical: anchored at the nasion, pointing toward the hairline
// midpoint. Unit length.
struct FacialAxis {
  Point origin;
  Point direction;
};

FacialAxis axis_from_landmarks(Point nasion, Point hairline_mid);

// Rotation about `center` followed by a translation. A positive angle turns
// +x toward +y, i.e. clockwise on screen since y grows downward.
struct RigidTransform {
  double rotation_deg = 0.0;
  Point center;
  Point translation;

  Point apply(Point p) const noexcept;
  Point invert(Point p) const noexcept;
  RigidTransform inverse() const noexcept;
};

// Nearest-neighbor resample: output pixel q takes the source pixel nearest
// to transform.invert(q). Output keeps the source dimensions.
RasterMask resample(const RasterMask& mask, const RigidTransform& transform);

// Rotates masks and landmarks about the nasion so the facial axis points
// straight up. The transform maps original to normalized coordinates.
std::pair<FaceRecord, RigidTransform> normalize_orientation(const FaceRecord& face);

// Applies an arbitrary rigid transform to every mask and landmark.
FaceRecord transform_face(const FaceRecord& face, const RigidTransform& transform);

struct MidlineSplit {
  double midline_x = 0.0;
  int split_column = 0;  // first column of the image-right half
  EyeRecord right;       // subject's right eye, image-left half, origin (0,0)
  EyeRecord left;        // subject's left eye, image-right half, origin (split_column,0)
};

// Midline is the mean of the two iris-center columns, or the image center
// when either iris is missing. Each eye's masks are cropped to its half.
MidlineSplit split_midline(const FaceRecord& face);

RasterMask crop(const RasterMask& mask, int x0, int y0, int width, int height);

}  // namespace periorbital
