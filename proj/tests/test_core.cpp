#include <random>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace periorbital;

TEST_CASE("registry has 36 names in the published order") {
  const auto& r = feature_registry();
  REQUIRE(r.size() == 36);
  const std::vector<std::string> side = {
      "mrd1", "mrd2", "iss", "sss", "vpf", "hpf", "medial_canthal_height", "lateral_canthal_height",
      "canthal_tilt_deg", "scleral_area_ratio", "brow_sup_medial", "brow_sup_central", "brow_sup_lateral",
      "brow_inf_medial", "brow_inf_central", "brow_inf_lateral"};
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(r[i] == "right_" + side[i]);
    CHECK(r[16 + i] == "left_" + side[i]);
  }
  CHECK(r[32] == "icd");
  CHECK(r[33] == "ipd");
  CHECK(r[34] == "ocd");
  CHECK(r[35] == "vertical_dystopia");
  CHECK(&feature_registry() == &r);
  CHECK(feature_registry() == r);
}

TEST_CASE("feature lookup and mirroring") {
  CHECK(find_feature("left_mrd1") == feature_index(EyeSide::Left, SideFeature::Mrd1));
  CHECK(find_feature("icd") == feature_index(GlobalFeature::Icd));
  CHECK_FALSE(find_feature("nope"));
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    CHECK(mirror_feature_index(mirror_feature_index(i)) == i);
    if (i < 32) {
      const auto& n = feature_registry()[i];
      const auto& m = feature_registry()[mirror_feature_index(i)];
      CHECK(n.substr(n.find('_')) == m.substr(m.find('_')));
      CHECK(n != m);
    } else {
      CHECK(mirror_feature_index(i) == i);
    }
  }
  int brow = 0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) brow += is_brow_feature(i);
  CHECK(brow == 12);
}

TEST_CASE("to_mm scales linear features and keeps dimensionless ones") {
  MeasurementSet px(Units::Px);
  px.set(EyeSide::Right, SideFeature::Mrd1, 30.0);
  px.set(EyeSide::Right, SideFeature::CanthalTiltDeg, 5.0);
  px.set(EyeSide::Right, SideFeature::ScleralAreaRatio, 2.5);
  px.set(EyeSide::Left, SideFeature::Mrd1, 30.0);
  px.set(GlobalFeature::Icd, 100.0);
  const Scale s = Scale::from_iris_diameter(100.0);
  const MeasurementSet mm = to_mm(px, s, s);
  CHECK(*mm.get(EyeSide::Right, SideFeature::Mrd1) == doctest::Approx(3.513).epsilon(1e-12));
  CHECK(*mm.get(EyeSide::Right, SideFeature::CanthalTiltDeg) == 5.0);
  CHECK(*mm.get(EyeSide::Right, SideFeature::ScleralAreaRatio) == 2.5);
  CHECK(*mm.get(GlobalFeature::Icd) == doctest::Approx(11.71).epsilon(1e-12));
  CHECK(Scale::from_iris_diameter(117.1).mm_per_px == doctest::Approx(0.1).epsilon(1e-12));

  // Face-global features need both scales; each side uses its own.
  const MeasurementSet half = to_mm(px, std::nullopt, s);
  CHECK_FALSE(half.valid(feature_index(GlobalFeature::Icd)));
  CHECK_FALSE(half.valid(feature_index(EyeSide::Left, SideFeature::Mrd1)));
  CHECK(half.valid(feature_index(EyeSide::Right, SideFeature::Mrd1)));
  const MeasurementSet two = to_mm(px, Scale::from_iris_diameter(50.0), s);
  CHECK(*two.get(GlobalFeature::Icd) == doctest::Approx(100.0 * 0.5 * (11.71 / 50 + 11.71 / 100)));
  CHECK_THROWS_AS(Scale::from_iris_diameter(0.0), Error);
}

TEST_CASE("measurement CSV round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  std::vector<MeasurementRow> rows;
  for (int r = 0; r < 20; ++r) {
    MeasurementSet s(r % 2 ? Units::Mm : Units::Px);
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      if (rng() % 5) s.set(i, std::round(u(rng) * 1e6) / 1e6);
    rows.push_back({"face," + std::to_string(r), s});
  }
  std::ostringstream a;
  write_measurement_csv(a, rows);
  std::istringstream in(a.str());
  const auto back = read_measurement_csv(in);
  REQUIRE(back.size() == rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    CHECK(back[r].id == rows[r].id);
    CHECK(back[r].set.units() == rows[r].set.units());
    CHECK(back[r].set.valid_bitmask() == rows[r].set.valid_bitmask());
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      if (rows[r].set.valid(i)) CHECK(back[r].set.value(i) == doctest::Approx(rows[r].set.value(i)).epsilon(1e-15));
  }
  std::ostringstream b;
  write_measurement_csv(b, back);
  CHECK(a.str() == b.str());
  CHECK(measurement_csv_header().rfind("id,units,right_mrd1,", 0) == 0);
}

TEST_CASE("malformed measurement CSV is rejected") {
  std::istringstream bad("id,units\nx,px\n");
  CHECK_THROWS_AS(read_measurement_csv(bad), Error);
}
