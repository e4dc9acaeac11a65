#include "io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csv.hpp"

namespace periorbital::io {

namespace {

constexpr std::array<const char*, 2> kSideNames = {"right", "left"};
constexpr std::array<const char*, 3> kClassNames = {"sclera", "iris", "brow"};
constexpr std::array<MaskClass, 3> kClasses = {MaskClass::Sclera, MaskClass::Iris, MaskClass::Brow};

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const fs::path& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw Error(ErrorCode::Parse, path.string() + ": truncated PGM header");
  return tok;
}

int pgm_int(std::istream& in, const fs::path& path) {
  const std::string tok = pgm_token(in, path);
  int v = 0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size() || v < 0)
    throw Error(ErrorCode::Parse, path.string() + ": bad PGM header value '" + tok + "'");
  return v;
}

Point parse_point(const std::string& value, const fs::path& path, const std::string& key) {
  std::istringstream ss(value);
  std::string xs, ys, extra;
  if (!(ss >> xs >> ys) || (ss >> extra))
    throw Error(ErrorCode::Parse, path.string() + ": '" + key + "' needs two coordinates");
  const double x = csv::parse_double(xs), y = csv::parse_double(ys);
  if (!std::isfinite(x) || !std::isfinite(y))
    throw Error(ErrorCode::Parse, path.string() + ": '" + key + "' has a non-finite coordinate");
  return Point{x, y};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void ensure_directory(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::Io, "cannot create directory " + dir.string());
}

RasterMask read_pgm(const fs::path& path, MaskClass cls) {
  std::ifstream in = open_in(path, std::ios::binary);
  const std::string magic = pgm_token(in, path);
  if (magic != "P5" && magic != "P2") throw Error(ErrorCode::Parse, path.string() + ": not a P5/P2 PGM file");
  const int w = pgm_int(in, path);
  const int h = pgm_int(in, path);
  const int maxval = pgm_int(in, path);
  if (w < 1 || h < 1) throw Error(ErrorCode::Parse, path.string() + ": PGM size must be positive");
  if (maxval < 1 || maxval > 255) throw Error(ErrorCode::Parse, path.string() + ": only 8-bit PGM is supported");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::uint8_t> bits(n);
  if (magic == "P5") {
    // pgm_token consumed the single whitespace byte after maxval.
    std::vector<char> raw(n);
    if (!in.read(raw.data(), static_cast<std::streamsize>(n)))
      throw Error(ErrorCode::Parse, path.string() + ": PGM pixel data truncated");
    for (std::size_t i = 0; i < n; ++i) bits[i] = 2 * static_cast<unsigned char>(raw[i]) > maxval ? 1 : 0;
  } else {
    for (std::size_t i = 0; i < n; ++i) bits[i] = 2 * pgm_int(in, path) > maxval ? 1 : 0;
  }
  return RasterMask(w, h, std::move(bits), cls);
}

void write_pgm(const fs::path& path, const RasterMask& mask) {
  std::ofstream out = open_out(path, std::ios::binary);
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  std::string raw(mask.bits().size(), '\0');
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = mask.bits()[i] ? static_cast<char>(255) : '\0';
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Landmarks read_landmarks(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::Parse, path.string() + ": expected 'key: value', got '" + t + "'");
    kv[trim(std::string_view(t).substr(0, colon))] = trim(std::string_view(t).substr(colon + 1));
  }
  const auto schema = kv.find("schema");
  if (schema == kv.end() || schema->second != kLandmarkSchema)
    throw Error(ErrorCode::Parse, path.string() + ": missing or unsupported landmark schema");
  Landmarks lm;
  for (const char* key : {"nasion", "hairline_mid"}) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::Parse, path.string() + ": missing '" + key + "'");
    (std::string_view(key) == "nasion" ? lm.nasion : lm.hairline_mid) = parse_point(it->second, path, key);
  }
  return lm;
}

void write_landmarks(const fs::path& path, const Landmarks& lm) {
  std::ofstream out = open_out(path);
  out << "schema: " << kLandmarkSchema << '\n'
      << "nasion: " << format_double(lm.nasion.x) << ' ' << format_double(lm.nasion.y) << '\n'
      << "hairline_mid: " << format_double(lm.hairline_mid.x) << ' ' << format_double(lm.hairline_mid.y) << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::string manifest_header() {
  return "id,dataset,right_sclera,right_iris,right_brow,left_sclera,left_iris,left_brow,landmarks,truth_csv";
}

fs::path Manifest::resolve(const std::string& p) const {
  const fs::path q(p);
  return q.is_absolute() ? q : base_dir / q;
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::string> f;
  if (!csv::next_record(in, f)) throw Error(ErrorCode::Parse, path.string() + ": manifest is empty");
  if (csv::join(f) != manifest_header())
    throw Error(ErrorCode::Parse, path.string() + ": manifest header must be '" + manifest_header() + "'");
  Manifest m;
  m.base_dir = path.parent_path();
  std::set<std::string> seen;
  std::size_t line = 1;
  while (csv::next_record(in, f)) {
    ++line;
    if (f.size() != 10)
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line) + ": expected 10 fields");
    ManifestEntry e;
    e.id = f[0];
    e.dataset = f[1];
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t c = 0; c < 3; ++c) e.masks[s][c] = f[2 + 3 * s + c];
    e.landmarks = f[8];
    e.truth_csv = f[9];
    if (e.id.empty()) throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line) + ": empty id");
    if (!seen.insert(e.id).second) throw Error(ErrorCode::Parse, path.string() + ": duplicate id '" + e.id + "'");
    m.entries.push_back(std::move(e));
  }
  return m;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out = open_out(path);
  out << manifest_header() << '\n';
  for (const auto& e : entries) {
    std::vector<std::string> f = {e.id, e.dataset};
    for (const auto& side : e.masks)
      for (const auto& p : side) f.push_back(p);
    f.push_back(e.landmarks);
    f.push_back(e.truth_csv);
    out << csv::join(f) << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

FaceMasks load_masks(const Manifest& manifest, const ManifestEntry& entry) {
  FaceMasks out;
  std::array<std::array<std::optional<RasterMask>, 3>, 2> found;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t c = 0; c < 3; ++c) {
      const std::string& rel = entry.masks[s][c];
      const std::string label = std::string(kSideNames[s]) + "_" + kClassNames[c];
      if (rel.empty() || !fs::exists(manifest.resolve(rel))) {
        out.missing.push_back(label);
        continue;
      }
      RasterMask m = read_pgm(manifest.resolve(rel), kClasses[c]);
      if (out.width == 0) {
        out.width = m.width();
        out.height = m.height();
      } else if (m.width() != out.width || m.height() != out.height) {
        throw Error(ErrorCode::DimensionMismatch, entry.id + ": " + label + " is " + std::to_string(m.width()) +
                                                      "x" + std::to_string(m.height()) + ", expected " +
                                                      std::to_string(out.width) + "x" + std::to_string(out.height));
      }
      found[s][c] = std::move(m);
    }
  if (out.width == 0) throw Error(ErrorCode::Io, entry.id + ": no mask file could be read");
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t c = 0; c < 3; ++c)
      out.masks[s][c] = found[s][c] ? std::move(*found[s][c]) : RasterMask(out.width, out.height, kClasses[c]);
  return out;
}

LoadedFace load_face(const Manifest& manifest, const ManifestEntry& entry) {
  FaceMasks masks = load_masks(manifest, entry);
  if (entry.landmarks.empty()) throw Error(ErrorCode::Io, entry.id + ": no landmark file listed");
  LoadedFace out;
  out.missing = std::move(masks.missing);
  FaceRecord& face = out.face;
  face.id = entry.id;
  face.width = masks.width;
  face.height = masks.height;
  face.landmarks = read_landmarks(manifest.resolve(entry.landmarks));
  for (std::size_t s = 0; s < 2; ++s) {
    EyeRecord& eye = s == 0 ? face.right : face.left;
    eye.side = s == 0 ? EyeSide::Right : EyeSide::Left;
    eye.id = entry.id;
    eye.sclera = std::move(masks.masks[s][0]);
    eye.iris = std::move(masks.masks[s][1]);
    eye.brow = std::move(masks.masks[s][2]);
  }
  face.validate();
  return out;
}

ManifestEntry save_face(const fs::path& dir, const FaceRecord& face, const std::string& dataset) {
  ManifestEntry e;
  e.id = face.id;
  e.dataset = dataset;
  for (std::size_t s = 0; s < 2; ++s) {
    const EyeRecord& eye = s == 0 ? face.right : face.left;
    const std::array<const RasterMask*, 3> src = {&eye.sclera, &eye.iris, &eye.brow};
    for (std::size_t c = 0; c < 3; ++c) {
      const std::string rel = "masks/" + face.id + "_" + kSideNames[s] + "_" + kClassNames[c] + ".pgm";
      write_pgm(dir / rel, *src[c]);
      e.masks[s][c] = rel;
    }
  }
  e.landmarks = "landmarks/" + face.id + ".txt";
  write_landmarks(dir / e.landmarks, face.landmarks);
  return e;
}

std::vector<std::pair<std::string, int>> read_labels(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::string> f;
  if (!csv::next_record(in, f) || csv::join(f) != "id,label")
    throw Error(ErrorCode::Parse, path.string() + ": labels header must be 'id,label'");
  std::vector<std::pair<std::string, int>> out;
  std::set<std::string> seen;
  while (csv::next_record(in, f)) {
    if (f.size() != 2) throw Error(ErrorCode::Parse, path.string() + ": expected 2 fields per row");
    int label;
    if (f[1] == "0" || f[1] == "healthy")
      label = 0;
    else if (f[1] == "1" || f[1] == "disease")
      label = 1;
    else
      throw Error(ErrorCode::Parse, path.string() + ": label must be 0/1 or healthy/disease, got '" + f[1] + "'");
    if (!seen.insert(f[0]).second) throw Error(ErrorCode::Parse, path.string() + ": duplicate id '" + f[0] + "'");
    out.emplace_back(f[0], label);
  }
  return out;
}

void write_labels(const fs::path& path, const std::vector<std::pair<std::string, int>>& labels) {
  std::ofstream out = open_out(path);
  out << "id,label\n";
  for (const auto& [id, label] : labels) out << csv::escape(id) << ',' << (label ? "disease" : "healthy") << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::vector<MeasurementRow> read_measurements(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return read_measurement_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_measurements(const fs::path& path, const std::vector<MeasurementRow>& rows) {
  std::ofstream out = open_out(path);
  write_measurement_csv(out, rows);
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace periorbital::io
