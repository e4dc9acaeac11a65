#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core.hpp"

namespace periorbital {

// Predicted and reference values for one feature, restricted to ids where
// both sources are valid.
struct PairedSeries {
  std::vector<std::string> ids;
  std::vector<double> predicted;
  std::vector<double> truth;
  std::string feature;
  Units units = Units::Px;

  std::size_t size() const noexcept { return predicted.size(); }
  void push(std::string id, double pred, double ref);
};

struct MaeSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample SD of the absolute errors; 0 when n == 1
  std::size_t n = 0;
};

MaeSummary mae(const PairedSeries& series);
MaeSummary mae(const std::vector<double>& abs_errors);
std::vector<double> absolute_errors(const PairedSeries& series);

struct AgreementReport {
  double mean_diff = 0.0;
  double sd_diff = 0.0;  // sample SD (n-1)
  double loa_low = 0.0;
  double loa_high = 0.0;
  double pct_outside = 0.0;  // strict exceedance of either bound
  std::size_t n = 0;
  // (mean of the pair, predicted - reference) for plotting.
  std::vector<std::array<double, 2>> points;
};

inline constexpr double kLoaZ = 1.96;

// Differences are predicted - reference. Requires n >= 2.
AgreementReport bland_altman(const PairedSeries& series);

double mean(const std::vector<double>& v);
// Sample standard deviation; 0 for fewer than two values.
double sample_sd(const std::vector<double>& v);
// Linear-interpolated quantile (the "type 7" definition), q in [0,1].
double quantile(std::vector<double> v, double q);

// Left/right pairs collapsed to one value each: the mean when both sides are
// valid, otherwise the one valid side. Face-global features pass through.
struct BilateralSet {
  Units units = Units::Px;
  std::array<std::optional<double>, kSideFeatureCount + kGlobalFeatureCount> values{};
};

BilateralSet bilateral_average(const MeasurementSet& set);
const std::vector<std::string>& bilateral_feature_names();

struct OutlierFilter {
  std::vector<double> kept;
  std::vector<std::size_t> kept_index;
  std::size_t removed = 0;
  double threshold = 0.0;  // mean + 1 sd of the input
};

// Single pass: drops errors strictly above mean + 1 sample SD.
OutlierFilter filter_outliers_1sd(const std::vector<double>& errors);

struct SubsetComparison {
  MaeSummary ours;
  MaeSummary baseline;
  std::size_t retained = 0;
  std::size_t total = 0;
  double coverage = 0.0;
};

// Scores both series only on ids the baseline did not fail on. `total` is
// the number of distinct ids in `ours`.
SubsetComparison subset_compare(const PairedSeries& ours, const PairedSeries& baseline,
                                const std::set<std::string>& baseline_failures);

PairedSeries restrict_ids(const PairedSeries& s, const std::set<std::string>& keep);

}  // namespace periorbital
