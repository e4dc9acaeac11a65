#include "anthro.hpp"
#include "doctest.h"
#include "stats.hpp"
#include "support.hpp"
#include "synth.hpp"

using namespace periorbital;

namespace {

FaceParams symmetric_face(double b = 20.0) {
  FaceParams f;
  f.nasion = {200, 150};
  f.hairline_mid = {200, 20};
  for (EyeSide side : {EyeSide::Right, EyeSide::Left}) {
    EyeParams& e = side == EyeSide::Right ? f.right : f.left;
    e.center = {side == EyeSide::Right ? 140.0 : 260.0, 150};
    e.semi_major = 50;
    e.semi_minor = b;
    e.iris_radius = 15;
    e.tilt_deg = 0;
    e.has_brow = true;
    e.brow = {e.center.x, 110, 0.0, 10, e.center.x - 58, e.center.x + 58};
  }
  return f;
}

double get(const MeasurementSet& s, EyeSide side, SideFeature f) { return *s.get(side, f); }

}  // namespace

TEST_CASE("closed-form truth for a centered iris") {
  const MeasurementSet t = analytic_measurements(symmetric_face());
  for (EyeSide s : {EyeSide::Right, EyeSide::Left}) {
    CHECK(get(t, s, SideFeature::Mrd1) == doctest::Approx(20));
    CHECK(get(t, s, SideFeature::Mrd2) == doctest::Approx(20));
    CHECK(get(t, s, SideFeature::Iss) == doctest::Approx(5));
    CHECK(get(t, s, SideFeature::Sss) == doctest::Approx(5));
    CHECK(get(t, s, SideFeature::Hpf) == 100.0);
    CHECK(get(t, s, SideFeature::CanthalTiltDeg) == 0.0);
    CHECK(get(t, s, SideFeature::BrowSupCentral) == 40.0);
    CHECK(get(t, s, SideFeature::BrowInfCentral) == 30.0);
  }
  CHECK(*t.get(GlobalFeature::VerticalDystopia) == 0.0);
  CHECK(*t.get(GlobalFeature::Icd) == 20.0);
  CHECK(*t.get(GlobalFeature::Ocd) == 220.0);
  CHECK(*t.get(GlobalFeature::Ipd) == 120.0);
  CHECK(t.valid_count() == 36);
}

TEST_CASE("rendered symmetric face measures close to its truth") {
  const RenderedFace r = render_face(symmetric_face());
  const MeasurementSet m = measure_face(r.face).px;
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    REQUIRE(m.valid(k));
    const double tol = feature_registry()[k].ends_with("scleral_area_ratio") ? 0.05 * r.truth_px.value(k) : 1.0;
    CHECK_MESSAGE(std::fabs(m.value(k) - r.truth_px.value(k)) <= tol, feature_registry()[k]);
  }
  // The mm truth uses the lattice iris width, 31 px here.
  CHECK(*r.truth_mm.get(EyeSide::Right, SideFeature::Mrd1) ==
        doctest::Approx(*r.truth_px.get(EyeSide::Right, SideFeature::Mrd1) * 11.71 / 31.0));
}

TEST_CASE("masks are consistent") {
  const RenderedFace r = render_face(sample_face_params(Phenotype::Disease, 4, 2));
  for (const EyeRecord* e : {&r.face.right, &r.face.left}) {
    CHECK(e->sclera.count() > 0);
    CHECK(e->iris.count() > 0);
    CHECK(e->brow.count() > 0);
    for (int y = 0; y < r.face.height; ++y)
      for (int x = 0; x < r.face.width; ++x) REQUIRE_FALSE((e->sclera.at(x, y) && e->iris.at(x, y)));
  }
}

TEST_CASE("invalid parameters are rejected") {
  FaceParams f = symmetric_face();
  f.right.center.x = 20;  // fissure leaves the image
  CHECK_THROWS_AS(render_face(f), Error);
  f = symmetric_face();
  f.left.iris_offset = {40, 0};
  CHECK_THROWS_AS(render_face(f), Error);
  f = symmetric_face();
  f.hairline_mid.y = 200;
  CHECK_THROWS_AS(render_face(f), Error);
}

TEST_CASE("proptotic eye shows more sclera") {
  const MeasurementSet healthy = analytic_measurements(symmetric_face(14));
  const MeasurementSet wide = analytic_measurements(symmetric_face(20));
  CHECK(get(wide, EyeSide::Right, SideFeature::ScleralAreaRatio) > get(healthy, EyeSide::Right, SideFeature::ScleralAreaRatio));
}

TEST_CASE("population is seeded and phenotypes differ") {
  const auto a = gen_population(30, Phenotype::Healthy, 17);
  const auto b = gen_population(30, Phenotype::Healthy, 17, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rendered.face.id == b[i].rendered.face.id);
    CHECK(a[i].rendered.face.right.sclera == b[i].rendered.face.right.sclera);
    CHECK(a[i].rendered.truth_px.values() == b[i].rendered.truth_px.values());
  }
  CHECK(a[0].rendered.face.id == "healthy_0000");
  CHECK_THROWS_AS(gen_population(0, Phenotype::Healthy, 1), Error);

  const auto mean_vpf = [](Phenotype p) {
    std::vector<double> v;
    for (std::size_t i = 0; i < 200; ++i) {
      const MeasurementSet t = analytic_measurements(sample_face_params(p, 5, i));
      v.push_back(*t.get(EyeSide::Right, SideFeature::Vpf));
      v.push_back(*t.get(EyeSide::Left, SideFeature::Vpf));
    }
    return mean(v);
  };
  CHECK(mean_vpf(Phenotype::Disease) > mean_vpf(Phenotype::Healthy));
}

TEST_CASE("analytic truth equals the truth carried by the render") {
  for (std::size_t i = 0; i < 5; ++i) {
    const FaceParams p = sample_face_params(Phenotype::Healthy, 8, i);
    CHECK(analytic_measurements(p).values() == render_face(p).truth_px.values());
  }
}
