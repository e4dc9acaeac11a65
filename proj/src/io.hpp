#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace periorbital::io {

namespace fs = std::filesystem;

// Binary PGM (P5) or ASCII PGM (P2), 8-bit. Samples above half of maxval are
// foreground.
RasterMask read_pgm(const fs::path& path, MaskClass cls = MaskClass::Sclera);
// Always P5 with 0/255 samples.
void write_pgm(const fs::path& path, const RasterMask& mask);

inline constexpr const char* kLandmarkSchema = "periorbital-landmarks/1";

// Plain key/value text:
//   schema: periorbital-landmarks/1
//   nasion: <x> <y>
//   hairline_mid: <x> <y>
// Blank lines and lines starting with '#' are ignored.
Landmarks read_landmarks(const fs::path& path);
void write_landmarks(const fs::path& path, const Landmarks& lm);

// Shortest decimal text that round-trips to the same double; "nan" for NaN.
std::string format_double(double v);

struct ManifestEntry {
  std::string id;
  std::string dataset;
  // Indexed [side][class]: side 0 = right, 1 = left; class sclera, iris, brow.
  // Empty string = no file for that class.
  std::array<std::array<std::string, 3>, 2> masks;
  std::string landmarks;
  std::string truth_csv;
};

std::string manifest_header();

struct Manifest {
  fs::path base_dir;  // relative paths resolve against this
  std::vector<ManifestEntry> entries;

  fs::path resolve(const std::string& p) const;
};

Manifest read_manifest(const fs::path& path);
void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries);

struct FaceMasks {
  // [side][class] as in ManifestEntry::masks; absent files load empty.
  std::array<std::array<RasterMask, 3>, 2> masks;
  int width = 0;
  int height = 0;
  std::vector<std::string> missing;  // e.g. "left_brow"
};

// Throws when a present mask fails to parse, sizes disagree, or no mask
// could be read at all.
FaceMasks load_masks(const Manifest& manifest, const ManifestEntry& entry);

struct LoadedFace {
  FaceRecord face;
  // Mask files that were listed but absent, or left blank; those masks load empty.
  std::vector<std::string> missing;
};

// Throws when landmarks are unreadable, a present mask fails to parse, the
// mask sizes disagree, or no mask at all could be read.
LoadedFace load_face(const Manifest& manifest, const ManifestEntry& entry);

// Writes the six masks and the landmark sidecar for `face` under `dir`,
// returning the manifest row with paths relative to `dir`.
ManifestEntry save_face(const fs::path& dir, const FaceRecord& face, const std::string& dataset);

// "id,label" where label is 0/1 or healthy/disease.
std::vector<std::pair<std::string, int>> read_labels(const fs::path& path);
void write_labels(const fs::path& path, const std::vector<std::pair<std::string, int>>& labels);

std::vector<MeasurementRow> read_measurements(const fs::path& path);
void write_measurements(const fs::path& path, const std::vector<MeasurementRow>& rows);

// Creates parent directories; throws Io on failure.
void ensure_directory(const fs::path& dir);

}  // namespace periorbital::io
