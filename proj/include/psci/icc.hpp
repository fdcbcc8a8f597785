#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psci/metrics.hpp"
#include "psci/rating_matrix.hpp"
#include "psci/score_grid.hpp"

namespace psci {

enum class IccVariant { icc1, icc2, icc3 };

std::string_view to_string(IccVariant variant);

struct IccResult {
  IccVariant variant = IccVariant::icc3;
  double single = 0.0;
  double mean_raters = 0.0;  // reliability of the mean of k raters
  std::size_t n_subjects = 0;
  std::size_t k_raters = 0;

  bool operator==(const IccResult&) const = default;
};

// Two-way ANOVA mean squares over an n x k grid.
struct MeanSquares {
  double between_subjects = 0.0;  // MSB (called MSR in some texts)
  double within_subjects = 0.0;   // MSW
  double between_raters = 0.0;    // MSC
  double residual = 0.0;          // MSE
  std::size_t n = 0;
  std::size_t k = 0;
};

// Requires n >= 2 and k >= 2 (insufficient_data otherwise).
MeanSquares two_way_mean_squares(const ScoreGrid& grid);

// Shrout-Fleiss ICC(1,1), ICC(2,1), ICC(3,1) and their k-rater forms.
// Throws degenerate_matrix when subjects carry no variance (MSB == 0),
// which includes the all-cells-equal case.
IccResult icc(const ScoreGrid& grid, IccVariant variant);
IccResult icc(const RatingMatrix& complete, IccVariant variant);

// k * single / (1 + (k - 1) * single). Throws pole when the denominator is
// not positive and out_of_range when k < 1.
double spearman_brown(double single, int k);

struct CombinationIcc {
  std::vector<std::string> assessors;
  std::optional<IccResult> icc3;
  std::string warning;  // why the subset was skipped

  bool operator==(const CombinationIcc&) const = default;
};

struct BestCombination {
  std::vector<std::string> assessors;
  IccResult icc3;
  std::vector<CombinationIcc> candidates;  // every subset considered
};

// Evaluates ICC3 on the complete-case submatrix of every subset of size
// >= min_size and picks the highest ICC3k. Ties (within 1e-12) go to the
// larger subset, then to the lexicographically smaller id list.
// Throws usage_error with fewer than 2 experts, no_valid_combination when
// every subset is degenerate.
BestCombination best_expert_combination(const RatingMatrix& matrix,
                                        const std::vector<std::string>& experts,
                                        std::size_t min_size = 2);

// Mean of the combination's ratings for each subject they all rated.
ReferenceSeries consensus(const RatingMatrix& matrix, const std::vector<std::string>& combination);

}  // namespace psci
