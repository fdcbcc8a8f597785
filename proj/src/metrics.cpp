#include "psci/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "psci/error.hpp"
#include "psci/score_grid.hpp"

namespace psci {

ScoreGrid to_grid(const RatingMatrix& complete) {
  ScoreGrid grid(complete.n_subjects(), complete.n_assessors());
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      const auto& cell = complete.at(i, j);
      if (!cell) throw Error(ErrorKind::insufficient_data, "matrix has missing cells");
      grid(i, j) = cell->value();
    }
  }
  return grid;
}

PairedSeries make_series(std::vector<double> predicted, std::vector<double> reference) {
  if (predicted.size() != reference.size()) {
    throw Error(ErrorKind::schema_error, "predicted and reference lengths differ");
  }
  if (predicted.empty()) throw Error(ErrorKind::insufficient_data, "empty series");
  return {std::move(predicted), std::move(reference)};
}

double mae(const PairedSeries& s) {
  if (s.n() == 0) throw Error(ErrorKind::insufficient_data, "empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) sum += std::abs(s.predicted[i] - s.reference[i]);
  return sum / static_cast<double>(s.n());
}

double mse(const PairedSeries& s) {
  if (s.n() == 0) throw Error(ErrorKind::insufficient_data, "empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double d = s.predicted[i] - s.reference[i];
    sum += d * d;
  }
  return sum / static_cast<double>(s.n());
}

namespace {

bool constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

double pearson(const PairedSeries& s) {
  if (s.n() < 2) throw Error(ErrorKind::insufficient_data, "pearson needs at least 2 pairs");
  if (constant(s.predicted)) throw Error(ErrorKind::zero_variance, "predicted");
  if (constant(s.reference)) throw Error(ErrorKind::zero_variance, "reference");
  const double mx = mean_of(s.predicted);
  const double my = mean_of(s.reference);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double dx = s.predicted[i] - mx;
    const double dy = s.reference[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

PairedSeries pair_with_reference(const RatingMatrix& matrix, std::size_t assessor,
                                 const ReferenceSeries& reference) {
  return pool_with_reference(matrix, {assessor}, reference);
}

PairedSeries pool_with_reference(const RatingMatrix& matrix, const std::vector<std::size_t>& columns,
                                 const ReferenceSeries& reference) {
  PairedSeries out;
  for (std::size_t i = 0; i < matrix.n_subjects(); ++i) {
    auto ref = reference.find(matrix.subjects()[i]);
    if (ref == reference.end()) continue;
    for (auto j : columns) {
      const auto& cell = matrix.at(i, j);
      if (!cell) continue;
      out.predicted.push_back(cell->value());
      out.reference.push_back(ref->second);
    }
  }
  return out;
}

AgreementMetrics agreement(const PairedSeries& series) {
  AgreementMetrics m;
  m.n = series.n();
  m.mae = mae(series);
  m.mse = mse(series);
  try {
    m.pearson = pearson(series);
  } catch (const Error& e) {
    m.pearson_error = e.what();
  }
  return m;
}

std::array<double, 10> rating_distribution(std::span<const int> ratings) {
  if (ratings.empty()) throw Error(ErrorKind::insufficient_data, "no ratings");
  std::array<std::size_t, 10> counts{};
  for (int r : ratings) {
    if (r < kMinRating || r > kMaxRating) throw Error(ErrorKind::out_of_range, std::to_string(r));
    ++counts[static_cast<std::size_t>(r - 1)];
  }
  std::array<double, 10> pct{};
  for (std::size_t i = 0; i < 10; ++i) {
    pct[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(ratings.size());
  }
  return pct;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::insufficient_data, "quantile of empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

int round_half_up(double value) { return static_cast<int>(std::floor(value + 0.5)); }

LevelDifferenceStats level_differences(const PairedSeries& series) {
  std::array<std::vector<double>, 10> diffs;
  for (std::size_t i = 0; i < series.n(); ++i) {
    const int level = std::clamp(round_half_up(series.reference[i]), kMinRating, kMaxRating);
    diffs[static_cast<std::size_t>(level - 1)].push_back(series.predicted[i] - series.reference[i]);
  }
  LevelDifferenceStats out;
  for (std::size_t l = 0; l < 10; ++l) {
    auto& stats = out.levels[l];
    stats.level = static_cast<int>(l) + 1;
    auto& d = diffs[l];
    stats.count = d.size();
    if (d.empty()) continue;
    std::sort(d.begin(), d.end());
    stats.min = d.front();
    stats.max = d.back();
    stats.q1 = quantile_sorted(d, 0.25);
    stats.median = quantile_sorted(d, 0.5);
    stats.q3 = quantile_sorted(d, 0.75);
  }
  return out;
}

std::vector<std::string> flag_outliers(const std::vector<std::pair<std::string, double>>& mae_by_assessor,
                                       double threshold) {
  std::vector<std::string> flagged;
  for (const auto& [id, value] : mae_by_assessor) {
    if (value > threshold) flagged.push_back(id);
  }
  return flagged;
}

std::vector<GroupMetrics> pooled_model_metrics(const RatingMatrix& matrix,
                                               const ReferenceSeries& reference,
                                               const std::set<std::string>& excluded) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> members;
  auto add = [&](const std::string& group, std::size_t j) {
    if (!members.count(group)) order.push_back(group);
    members[group].push_back(j);
  };
  for (std::size_t j = 0; j < matrix.n_assessors(); ++j) {
    const auto& a = matrix.assessors()[j];
    if (a.kind == AssessorKind::model_run && !excluded.count(a.id)) add(a.model_id, j);
  }
  for (auto kind : {AssessorKind::human_expert, AssessorKind::human_intermediate,
                    AssessorKind::human_novice}) {
    for (std::size_t j = 0; j < matrix.n_assessors(); ++j) {
      const auto& a = matrix.assessors()[j];
      if (a.kind == kind && !excluded.count(a.id)) add(std::string(to_string(kind)), j);
    }
  }

  std::vector<GroupMetrics> out;
  for (const auto& group : order) {
    const auto series = pool_with_reference(matrix, members[group], reference);
    if (series.n() == 0) continue;
    out.push_back({group, members[group].size(), agreement(series)});
  }
  return out;
}

}  // namespace psci
