#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psci/rating_matrix.hpp"

namespace psci {

// Reference ratings by image id. Values may be fractional (expert means).
using ReferenceSeries = std::map<std::string, double>;

struct PairedSeries {
  std::vector<double> predicted;
  std::vector<double> reference;

  std::size_t n() const noexcept { return predicted.size(); }
};

// Throws schema_error on length mismatch and insufficient_data when empty.
PairedSeries make_series(std::vector<double> predicted, std::vector<double> reference);

double mae(const PairedSeries& series);
double mse(const PairedSeries& series);
// Sample correlation. Throws insufficient_data for n < 2 and
// zero_variance("predicted" | "reference") when a side is constant.
double pearson(const PairedSeries& series);

// Pairwise-complete pairing of one assessor column against the reference.
PairedSeries pair_with_reference(const RatingMatrix& matrix, std::size_t assessor,
                                 const ReferenceSeries& reference);
// Pools every (subject, column) pair of the given columns into one series.
PairedSeries pool_with_reference(const RatingMatrix& matrix, const std::vector<std::size_t>& columns,
                                 const ReferenceSeries& reference);

struct AgreementMetrics {
  std::size_t n = 0;
  double mae = 0.0;
  double mse = 0.0;
  std::optional<double> pearson;
  std::string pearson_error;  // set when pearson is absent

  bool operator==(const AgreementMetrics&) const = default;
};

// Throws insufficient_data on an empty series; a degenerate correlation is
// reported in pearson_error instead of throwing.
AgreementMetrics agreement(const PairedSeries& series);

// Percentage of ratings at each level; index 0 is level 1.
std::array<double, 10> rating_distribution(std::span<const int> ratings);

struct LevelStats {
  int level = 0;
  std::size_t count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;

  bool empty() const noexcept { return count == 0; }
  bool operator==(const LevelStats&) const = default;
};

struct LevelDifferenceStats {
  std::array<LevelStats, 10> levels;  // index 0 is level 1

  bool operator==(const LevelDifferenceStats&) const = default;
};

// Linear interpolation between order statistics; sorted must be ascending
// and non-empty, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);
int round_half_up(double value);

// Groups pairs by round-half-up of the reference into levels 1..10 and
// summarizes predicted - reference within each level.
LevelDifferenceStats level_differences(const PairedSeries& series);

// Assessors whose MAE is strictly above threshold, in input order.
std::vector<std::string> flag_outliers(const std::vector<std::pair<std::string, double>>& mae_by_assessor,
                                       double threshold = 2.0);

struct GroupMetrics {
  std::string group;  // model id, or human kind name
  std::size_t members = 0;
  AgreementMetrics metrics;

  bool operator==(const GroupMetrics&) const = default;
};

// Pools (image, run) pairs per model and (image, member) pairs per human
// group. Assessors listed in excluded are left out. Groups with no paired
// data are omitted.
std::vector<GroupMetrics> pooled_model_metrics(const RatingMatrix& matrix,
                                               const ReferenceSeries& reference,
                                               const std::set<std::string>& excluded = {});

}  // namespace psci
