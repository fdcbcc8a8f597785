#include "psci/icc.hpp"

#include <algorithm>

#include "psci/error.hpp"

namespace psci {

std::string_view to_string(IccVariant variant) {
  switch (variant) {
    case IccVariant::icc1: return "icc1";
    case IccVariant::icc2: return "icc2";
    case IccVariant::icc3: return "icc3";
  }
  return "icc3";
}

MeanSquares two_way_mean_squares(const ScoreGrid& g) {
  const std::size_t n = g.rows;
  const std::size_t k = g.cols;
  if (n < 2 || k < 2) throw Error(ErrorKind::insufficient_data, "ICC needs >= 2 subjects and >= 2 raters");

  double grand = 0.0;
  for (double x : g.data) grand += x;
  grand /= static_cast<double>(n * k);

  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += g(i, j);
      col_mean[j] += g(i, j);
    }
  }
  for (auto& m : row_mean) m /= static_cast<double>(k);
  for (auto& m : col_mean) m /= static_cast<double>(n);

  double ss_rows = 0.0, ss_cols = 0.0, ss_within = 0.0, ss_resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_rows += (row_mean[i] - grand) * (row_mean[i] - grand);
    for (std::size_t j = 0; j < k; ++j) {
      const double w = g(i, j) - row_mean[i];
      const double e = w - col_mean[j] + grand;
      ss_within += w * w;
      ss_resid += e * e;
    }
  }
  for (std::size_t j = 0; j < k; ++j) ss_cols += (col_mean[j] - grand) * (col_mean[j] - grand);
  ss_rows *= static_cast<double>(k);
  ss_cols *= static_cast<double>(n);

  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  MeanSquares ms;
  ms.n = n;
  ms.k = k;
  ms.between_subjects = ss_rows / (dn - 1);
  ms.within_subjects = ss_within / (dn * (dk - 1));
  ms.between_raters = ss_cols / (dk - 1);
  ms.residual = ss_resid / ((dn - 1) * (dk - 1));
  return ms;
}

IccResult icc(const ScoreGrid& grid, IccVariant variant) {
  const auto ms = two_way_mean_squares(grid);
  if (ms.between_subjects <= 0.0) {
    throw Error(ErrorKind::degenerate_matrix, "subjects show no variance");
  }
  const double b = ms.between_subjects;
  const double w = ms.within_subjects;
  const double c = ms.between_raters;
  const double e = ms.residual;
  const double k = static_cast<double>(ms.k);
  const double n = static_cast<double>(ms.n);

  IccResult r;
  r.variant = variant;
  r.n_subjects = ms.n;
  r.k_raters = ms.k;
  switch (variant) {
    case IccVariant::icc1:
      r.single = (b - w) / (b + (k - 1) * w);
      r.mean_raters = (b - w) / b;
      break;
    case IccVariant::icc2:
      r.single = (b - e) / (b + (k - 1) * e + k * (c - e) / n);
      r.mean_raters = (b - e) / (b + (c - e) / n);
      break;
    case IccVariant::icc3:
      r.single = (b - e) / (b + (k - 1) * e);
      r.mean_raters = (b - e) / b;
      break;
  }
  return r;
}

IccResult icc(const RatingMatrix& complete, IccVariant variant) {
  return icc(to_grid(complete), variant);
}

double spearman_brown(double single, int k) {
  if (k < 1) throw Error(ErrorKind::out_of_range, "k must be >= 1");
  const double denom = 1.0 + (k - 1) * single;
  if (k >= 2 && denom <= 0.0) throw Error(ErrorKind::pole, "single <= -1/(k-1)");
  return k * single / denom;
}

namespace {

constexpr double kTieTolerance = 1e-12;

bool better(const CombinationIcc& a, const CombinationIcc& b) {
  const double da = a.icc3->mean_raters, db = b.icc3->mean_raters;
  if (da > db + kTieTolerance) return true;
  if (db > da + kTieTolerance) return false;
  if (a.assessors.size() != b.assessors.size()) return a.assessors.size() > b.assessors.size();
  auto sa = a.assessors, sb = b.assessors;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa < sb;
}

}  // namespace

BestCombination best_expert_combination(const RatingMatrix& matrix,
                                        const std::vector<std::string>& experts,
                                        std::size_t min_size) {
  if (experts.size() < 2) throw Error(ErrorKind::usage_error, "need at least 2 experts");
  if (experts.size() > 20) throw Error(ErrorKind::usage_error, "too many experts to enumerate");
  min_size = std::max<std::size_t>(min_size, 2);
  for (const auto& id : experts) {
    if (!matrix.assessor_index(id)) throw Error(ErrorKind::unknown_assessor, id);
  }

  BestCombination result;
  const std::size_t m = experts.size();
  // Enumerate by size, then by index order, so candidate listing is stable.
  for (std::size_t size = min_size; size <= m; ++size) {
    std::vector<bool> pick(m, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
    do {
      CombinationIcc cand;
      for (std::size_t i = 0; i < m; ++i) {
        if (pick[i]) cand.assessors.push_back(experts[i]);
      }
      try {
        cand.icc3 = icc(complete_cases(matrix, cand.assessors), IccVariant::icc3);
      } catch (const Error& e) {
        cand.warning = e.what();
      }
      result.candidates.push_back(std::move(cand));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }

  const CombinationIcc* best = nullptr;
  for (const auto& cand : result.candidates) {
    if (!cand.icc3) continue;
    if (!best || better(cand, *best)) best = &cand;
  }
  if (!best) throw Error(ErrorKind::no_valid_combination, "every expert subset was degenerate");
  result.assessors = best->assessors;
  result.icc3 = *best->icc3;
  return result;
}

ReferenceSeries consensus(const RatingMatrix& matrix, const std::vector<std::string>& combination) {
  const auto sub = complete_cases(matrix, combination);
  ReferenceSeries out;
  for (std::size_t i = 0; i < sub.n_subjects(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < sub.n_assessors(); ++j) sum += sub.at(i, j)->value();
    out[sub.subjects()[i]] = sum / static_cast<double>(sub.n_assessors());
  }
  return out;
}

}  // namespace psci
