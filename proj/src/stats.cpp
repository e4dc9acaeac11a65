#include "stats.hpp"

#include <algorithm>
#include <cmath>

namespace periorbital {

void PairedSeries::push(std::string id, double pred, double ref) {
  ids.push_back(std::move(id));
  predicted.push_back(pred);
  truth.push_back(ref);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "mean of an empty series");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty series");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> absolute_errors(const PairedSeries& series) {
  std::vector<double> e(series.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::abs(series.predicted[i] - series.truth[i]);
  return e;
}

MaeSummary mae(const std::vector<double>& abs_errors) {
  if (abs_errors.empty()) throw Error(ErrorCode::InvalidArgument, "mae: empty series");
  return MaeSummary{mean(abs_errors), sample_sd(abs_errors), abs_errors.size()};
}

MaeSummary mae(const PairedSeries& series) {
  if (series.predicted.size() != series.truth.size())
    throw Error(ErrorCode::DimensionMismatch, "mae: predicted/truth length mismatch");
  return mae(absolute_errors(series));
}

AgreementReport bland_altman(const PairedSeries& series) {
  const std::size_t n = series.size();
  if (series.truth.size() != n) throw Error(ErrorCode::DimensionMismatch, "bland_altman: length mismatch");
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "bland_altman: needs at least two pairs");
  AgreementReport r;
  r.n = n;
  std::vector<double> diffs(n);
  r.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    diffs[i] = series.predicted[i] - series.truth[i];
    r.points[i] = {0.5 * (series.predicted[i] + series.truth[i]), diffs[i]};
  }
  r.mean_diff = mean(diffs);
  r.sd_diff = sample_sd(diffs);
  r.loa_low = r.mean_diff - kLoaZ * r.sd_diff;
  r.loa_high = r.mean_diff + kLoaZ * r.sd_diff;
  const auto outside = std::count_if(diffs.begin(), diffs.end(),
                                     [&](double d) { return d < r.loa_low || d > r.loa_high; });
  r.pct_outside = 100.0 * static_cast<double>(outside) / static_cast<double>(n);
  return r;
}

const std::vector<std::string>& bilateral_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < kSideFeatureCount; ++i)
      v.emplace_back(side_feature_name(static_cast<SideFeature>(i)));
    for (std::size_t i = 0; i < kGlobalFeatureCount; ++i)
      v.emplace_back(global_feature_name(static_cast<GlobalFeature>(i)));
    return v;
  }();
  return names;
}

BilateralSet bilateral_average(const MeasurementSet& set) {
  BilateralSet out;
  out.units = set.units();
  for (std::size_t i = 0; i < kSideFeatureCount; ++i) {
    const auto f = static_cast<SideFeature>(i);
    const auto r = set.get(EyeSide::Right, f);
    const auto l = set.get(EyeSide::Left, f);
    if (r && l)
      out.values[i] = 0.5 * (*r + *l);
    else if (r)
      out.values[i] = r;
    else if (l)
      out.values[i] = l;
  }
  for (std::size_t i = 0; i < kGlobalFeatureCount; ++i)
    out.values[kSideFeatureCount + i] = set.get(static_cast<GlobalFeature>(i));
  return out;
}

OutlierFilter filter_outliers_1sd(const std::vector<double>& errors) {
  OutlierFilter f;
  if (errors.size() < 2) {
    f.kept = errors;
    for (std::size_t i = 0; i < errors.size(); ++i) f.kept_index.push_back(i);
    f.threshold = errors.empty() ? 0.0 : errors.front();
    return f;
  }
  f.threshold = mean(errors) + sample_sd(errors);
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > f.threshold) {
      ++f.removed;
    } else {
      f.kept.push_back(errors[i]);
      f.kept_index.push_back(i);
    }
  }
  return f;
}

PairedSeries restrict_ids(const PairedSeries& s, const std::set<std::string>& keep) {
  PairedSeries out;
  out.feature = s.feature;
  out.units = s.units;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (keep.count(s.ids[i])) out.push(s.ids[i], s.predicted[i], s.truth[i]);
  return out;
}

SubsetComparison subset_compare(const PairedSeries& ours, const PairedSeries& baseline,
                                const std::set<std::string>& baseline_failures) {
  const std::set<std::string> ours_ids(ours.ids.begin(), ours.ids.end());
  const std::set<std::string> base_ids(baseline.ids.begin(), baseline.ids.end());
  std::set<std::string> keep;
  for (const auto& id : ours_ids)
    if (base_ids.count(id) && !baseline_failures.count(id)) keep.insert(id);
  if (keep.empty()) throw Error(ErrorCode::InvalidArgument, "subset_compare: no ids survive the exclusion");
  SubsetComparison c;
  c.ours = mae(restrict_ids(ours, keep));
  c.baseline = mae(restrict_ids(baseline, keep));
  c.retained = keep.size();
  c.total = ours_ids.size();
  c.coverage = static_cast<double>(c.retained) / static_cast<double>(c.total);
  return c;
}

}  // namespace periorbital
