#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "io.hpp"
#include "report.hpp"
#include "stats.hpp"
#include "support.hpp"

using namespace periorbital;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("periorbital_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("PGM round-trip and parsing") {
  TempDir dir("pgm");
  std::mt19937_64 rng(3);
  const RasterMask m = testing::random_mask(rng, 17, 9, 0.4);
  io::write_pgm(dir.path / "m.pgm", m);
  CHECK(io::read_pgm(dir.path / "m.pgm") == m);
  CHECK(slurp(dir.path / "m.pgm").rfind("P5\n17 9\n255\n", 0) == 0);

  write_file(dir.path / "a.pgm", "P2\n# comment\n3 2\n15\n0 8 7\n15 0 1\n");
  const RasterMask a = io::read_pgm(dir.path / "a.pgm");
  CHECK(a.width() == 3);
  CHECK(a.at(1, 0));
  CHECK_FALSE(a.at(2, 0));
  CHECK(a.at(0, 1));
  CHECK(a.count() == 2);

  write_file(dir.path / "bad.pgm", "P6\n1 1\n255\n\0\0\0");
  CHECK_THROWS_AS(io::read_pgm(dir.path / "bad.pgm"), Error);
  write_file(dir.path / "short.pgm", "P5\n4 4\n255\n\xff");
  CHECK_THROWS_AS(io::read_pgm(dir.path / "short.pgm"), Error);
  CHECK_THROWS_AS(io::read_pgm(dir.path / "absent.pgm"), Error);
}

TEST_CASE("landmark sidecar") {
  TempDir dir("lm");
  const Landmarks lm{{200.25, 150}, {199.5, 20}};
  io::write_landmarks(dir.path / "l.txt", lm);
  const Landmarks back = io::read_landmarks(dir.path / "l.txt");
  CHECK(back.nasion == lm.nasion);
  CHECK(back.hairline_mid == lm.hairline_mid);
  write_file(dir.path / "c.txt", "# x\nschema: periorbital-landmarks/1\n\nhairline_mid: 1 2\nnasion: 3 4\n");
  CHECK(io::read_landmarks(dir.path / "c.txt").nasion == Point{3, 4});
  write_file(dir.path / "v.txt", "schema: periorbital-landmarks/9\nnasion: 3 4\nhairline_mid: 1 2\n");
  CHECK_THROWS_AS(io::read_landmarks(dir.path / "v.txt"), Error);
  write_file(dir.path / "m.txt", "schema: periorbital-landmarks/1\nnasion: 3 4\n");
  CHECK_THROWS_AS(io::read_landmarks(dir.path / "m.txt"), Error);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("manifest round-trip and validation") {
  TempDir dir("manifest");
  io::ManifestEntry e;
  e.id = "face,1";
  e.dataset = "healthy";
  e.masks[0] = {"masks/a.pgm", "masks/b.pgm", ""};
  e.masks[1] = {"masks/c.pgm", "masks/d.pgm", "masks/e.pgm"};
  e.landmarks = "lm/a.txt";
  io::write_manifest(dir.path / "m.csv", {e});
  const io::Manifest m = io::read_manifest(dir.path / "m.csv");
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].id == "face,1");
  CHECK(m.entries[0].masks[0][2].empty());
  CHECK(m.entries[0].masks[1][2] == "masks/e.pgm");
  CHECK(m.resolve("masks/a.pgm") == dir.path / "masks/a.pgm");
  CHECK(m.resolve("/abs/x.pgm") == fs::path("/abs/x.pgm"));

  io::write_manifest(dir.path / "dup.csv", {e, e});
  CHECK_THROWS_AS(io::read_manifest(dir.path / "dup.csv"), Error);
  write_file(dir.path / "hdr.csv", "id,foo\n");
  CHECK_THROWS_AS(io::read_manifest(dir.path / "hdr.csv"), Error);
}

TEST_CASE("face save and load") {
  TempDir dir("face");
  FaceRecord f;
  f.id = "f0";
  f.width = 40;
  f.height = 20;
  f.right = testing::make_eye(EyeSide::Right, 40, 20, 10, 10, 6, 3, 10, 10, 2);
  f.left = testing::make_eye(EyeSide::Left, 40, 20, 30, 10, 6, 3, 30, 10, 2);
  f.right.brow = testing::rect(40, 20, 5, 1, 15, 3, MaskClass::Brow);
  f.left.brow = testing::rect(40, 20, 25, 1, 35, 3, MaskClass::Brow);
  f.landmarks = {{20, 15}, {20, 0}};
  const io::ManifestEntry e = io::save_face(dir.path, f, "healthy");
  io::write_manifest(dir.path / "manifest.csv", {e});
  const io::Manifest m = io::read_manifest(dir.path / "manifest.csv");
  const io::LoadedFace back = io::load_face(m, m.entries[0]);
  CHECK(back.missing.empty());
  CHECK(back.face.right.sclera == f.right.sclera);
  CHECK(back.face.left.brow == f.left.brow);
  CHECK(back.face.landmarks.nasion == f.landmarks.nasion);

  // A listed but absent file loads empty and is reported.
  fs::remove(dir.path / m.entries[0].masks[1][2]);
  const io::LoadedFace partial = io::load_face(m, m.entries[0]);
  CHECK(partial.missing == std::vector<std::string>{"left_brow"});
  CHECK(partial.face.left.brow.empty());

  // Size disagreement is an error.
  io::write_pgm(dir.path / m.entries[0].masks[0][1], RasterMask(41, 20));
  CHECK_THROWS_AS(io::load_face(m, m.entries[0]), Error);
}

TEST_CASE("labels") {
  TempDir dir("labels");
  write_file(dir.path / "l.csv", "id,label\na,0\nb,1\nc,healthy\nd,disease\n");
  const auto l = io::read_labels(dir.path / "l.csv");
  REQUIRE(l.size() == 4);
  CHECK(l[1].second == 1);
  CHECK(l[2].second == 0);
  CHECK(l[3].second == 1);
  io::write_labels(dir.path / "o.csv", l);
  CHECK(io::read_labels(dir.path / "o.csv") == l);
  write_file(dir.path / "bad.csv", "id,label\na,2\n");
  CHECK_THROWS_AS(io::read_labels(dir.path / "bad.csv"), Error);
}

TEST_CASE("Bland-Altman SVG") {
  PairedSeries s;
  s.push("a", 1, 0);
  s.push("b", 2, 2.5);
  s.push("c", 4, 3);
  const AgreementReport r = bland_altman(s);
  const std::string svg = bland_altman_svg(r, "mrd1 <px>");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("mrd1 &lt;px&gt;") != std::string::npos);
  std::size_t circles = 0, dashed = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  for (std::size_t p = svg.find("stroke-dasharray"); p != std::string::npos; p = svg.find("stroke-dasharray", p + 1))
    ++dashed;
  CHECK(circles == 3);
  CHECK(dashed == 2);
  CHECK(bland_altman_svg(r, "mrd1 <px>") == svg);
}
