#include <algorithm>
#include <random>

#include "doctest.h"
#include "stats.hpp"
#include "support.hpp"

using namespace periorbital;

namespace {

PairedSeries make(const std::vector<double>& pred, const std::vector<double>& truth) {
  PairedSeries s;
  for (std::size_t i = 0; i < pred.size(); ++i) s.push("id" + std::to_string(i), pred[i], truth[i]);
  return s;
}

// Straightforward long-double references.
long double ref_mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return s / static_cast<long double>(v.size());
}

long double ref_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const long double m = ref_mean(v);
  long double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<long double>(v.size() - 1));
}

bool close(double a, long double b) { return std::fabs(static_cast<long double>(a) - b) <= 1e-9L * (1 + std::fabs(b)); }

}  // namespace

TEST_CASE("mae examples") {
  CHECK(mae(make({1, 2, 3}, {1, 2, 3})).mean == 0.0);
  CHECK(mae(make({1, 2, 3}, {1, 2, 3})).sd == 0.0);
  CHECK(mae(make({2, 3, 5}, {1, 2, 3})).mean == doctest::Approx(4.0 / 3.0));
  const MaeSummary one = mae(make({5}, {7}));
  CHECK(one.mean == 2.0);
  CHECK(one.sd == 0.0);
  CHECK(one.n == 1);
  CHECK_THROWS_AS(mae(PairedSeries{}), Error);
}

TEST_CASE("bland_altman examples") {
  const AgreementReport z = bland_altman(make({1, 2, 3}, {1, 2, 3}));
  CHECK(z.mean_diff == 0.0);
  CHECK(z.loa_low == 0.0);
  CHECK(z.loa_high == 0.0);
  CHECK(z.pct_outside == 0.0);
  const AgreementReport a = bland_altman(make({1, -1, 1, -1}, {0, 0, 0, 0}));
  CHECK(a.mean_diff == 0.0);
  CHECK(a.sd_diff == doctest::Approx(1.1547005383792515));
  CHECK(a.loa_high == doctest::Approx(2.2632130552233));
  CHECK(a.loa_low == doctest::Approx(-2.2632130552233));
  CHECK(a.pct_outside == 0.0);
  // Differences 0,0,0,10: mean 2.5, sample sd 5, LOA [-7.3, 12.3], so the
  // largest difference still sits inside the band.
  const AgreementReport c = bland_altman(make({0, 0, 0, 10}, {0, 0, 0, 0}));
  CHECK(c.sd_diff == 5.0);
  CHECK(c.loa_high == doctest::Approx(12.3));
  CHECK(c.pct_outside == 0.0);
  // Eight pairs with one at 30: LOA high is about 24.5, one of eight outside.
  const AgreementReport b = bland_altman(make({0, 0, 0, 0, 0, 0, 0, 30}, {0, 0, 0, 0, 0, 0, 0, 0}));
  CHECK(b.pct_outside == doctest::Approx(12.5));
  CHECK(a.points.size() == 4);
  CHECK_THROWS_AS(bland_altman(make({1}, {2})), Error);
}

TEST_CASE("bilateral average") {
  MeasurementSet s(Units::Px);
  s.set(EyeSide::Left, SideFeature::Mrd1, 2);
  s.set(EyeSide::Right, SideFeature::Mrd1, 4);
  s.set(EyeSide::Right, SideFeature::Mrd2, 4);
  s.set(GlobalFeature::Icd, 31);
  const BilateralSet b = bilateral_average(s);
  const auto& names = bilateral_feature_names();
  REQUIRE(names.size() == 20);
  CHECK(names[0] == "mrd1");
  CHECK(names[16] == "icd");
  CHECK(*b.values[0] == 3.0);
  CHECK(*b.values[1] == 4.0);
  CHECK_FALSE(b.values[2]);
  CHECK(*b.values[16] == 31.0);
}

TEST_CASE("filter_outliers_1sd examples") {
  const OutlierFilter u = filter_outliers_1sd({2, 2, 2, 2});
  CHECK(u.removed == 0);
  const OutlierFilter f = filter_outliers_1sd({1, 1, 1, 100});
  CHECK(f.threshold == doctest::Approx(25.75 + 49.5));
  CHECK(f.removed == 1);
  CHECK(f.kept == std::vector<double>{1, 1, 1});
  CHECK(f.kept_index == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("subset_compare") {
  const PairedSeries ours = make({1, 2, 3, 4}, {0, 0, 0, 0});
  const PairedSeries base = make({2, 2, 2, 2}, {0, 0, 0, 0});
  const SubsetComparison all = subset_compare(ours, base, {});
  CHECK(all.coverage == 1.0);
  CHECK(all.ours.mean == 2.5);
  const SubsetComparison half = subset_compare(ours, base, {"id2", "id3"});
  CHECK(half.coverage == 0.5);
  CHECK(half.retained == 2);
  CHECK(half.ours.mean == 1.5);
  CHECK(half.baseline.mean == 2.0);
}

TEST_CASE("quantile") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({4, 1, 2, 3}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
  CHECK(quantile({1, 2}, 0.25) == 1.25);
}

TEST_CASE("statistics match brute-force references on random series") {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> noise(0.0, 2.0);
  std::uniform_real_distribution<double> base(-50.0, 50.0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = base(rng);
      pred[i] = truth[i] + noise(rng) + (rng() % 10 == 0 ? 15.0 : 0.0);
    }
    const PairedSeries s = make(pred, truth);

    std::vector<double> abs(n), diff(n);
    for (std::size_t i = 0; i < n; ++i) {
      diff[i] = pred[i] - truth[i];
      abs[i] = std::fabs(diff[i]);
    }
    const MaeSummary m = mae(s);
    CHECK(close(m.mean, ref_mean(abs)));
    CHECK(close(m.sd, ref_sd(abs)));

    const AgreementReport r = bland_altman(s);
    const long double md = ref_mean(diff), sd = ref_sd(diff);
    CHECK(close(r.mean_diff, md));
    CHECK(close(r.sd_diff, sd));
    CHECK(close(r.loa_low, md - 1.96L * sd));
    CHECK(close(r.loa_high, md + 1.96L * sd));
    std::size_t out = 0;
    for (double d : diff) out += d < md - 1.96L * sd || d > md + 1.96L * sd;
    CHECK(close(r.pct_outside, 100.0L * out / n));

    const OutlierFilter f = filter_outliers_1sd(abs);
    const long double cut = ref_mean(abs) + ref_sd(abs);
    std::vector<double> kept;
    for (double e : abs)
      if (e <= cut) kept.push_back(e);
    CHECK(f.kept == kept);
    CHECK(f.removed == n - kept.size());
    CHECK(mae(f.kept).mean <= m.mean + 1e-12);
  }
}
