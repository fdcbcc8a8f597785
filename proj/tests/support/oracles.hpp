#pragma once

// Reference implementations used only by tests. Each one is written the
// plain way (raw sums, naive loops, a library eigensolver) so it shares no
// code path with the library under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace psci::oracle {

using Grid = std::vector<std::vector<double>>;  // [subject][rater]

struct IccOracle {
  double icc1 = 0, icc2 = 0, icc3 = 0;
  double icc1k = 0, icc2k = 0, icc3k = 0;
};

// Two-way ANOVA from raw sums of squares with the correction term.
inline IccOracle icc_anova(const Grid& x) {
  const auto n = static_cast<long double>(x.size());
  const auto k = static_cast<long double>(x.front().size());
  long double total = 0, sumsq = 0;
  std::vector<long double> row(x.size(), 0), col(x.front().size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x[i].size(); ++j) {
      total += x[i][j];
      sumsq += static_cast<long double>(x[i][j]) * x[i][j];
      row[i] += x[i][j];
      col[j] += x[i][j];
    }
  }
  const long double cf = total * total / (n * k);
  const long double sst = sumsq - cf;
  long double ssr = 0, ssc = 0;
  for (auto r : row) ssr += r * r;
  for (auto c : col) ssc += c * c;
  ssr = ssr / k - cf;
  ssc = ssc / n - cf;
  const long double sse = sst - ssr - ssc;
  const long double ssw = sst - ssr;
  const long double msr = ssr / (n - 1);
  const long double msc = ssc / (k - 1);
  const long double mse = sse / ((n - 1) * (k - 1));
  const long double msw = ssw / (n * (k - 1));
  IccOracle o;
  o.icc1 = static_cast<double>((msr - msw) / (msr + (k - 1) * msw));
  o.icc2 = static_cast<double>((msr - mse) / (msr + (k - 1) * mse + k * (msc - mse) / n));
  o.icc3 = static_cast<double>((msr - mse) / (msr + (k - 1) * mse));
  o.icc1k = static_cast<double>((msr - msw) / msr);
  o.icc2k = static_cast<double>((msr - mse) / (msr + (msc - mse) / n));
  o.icc3k = static_cast<double>((msr - mse) / msr);
  return o;
}

inline double mae(const std::vector<double>& y, const std::vector<double>& r) {
  long double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::fabs(static_cast<long double>(y[i]) - r[i]);
  return static_cast<double>(s / y.size());
}

inline double mse(const std::vector<double>& y, const std::vector<double>& r) {
  long double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    long double d = static_cast<long double>(y[i]) - r[i];
    s += d * d;
  }
  return static_cast<double>(s / y.size());
}

// Textbook single-pass formula in extended precision.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = x.size();
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  long double num = n * sxy - sx * sy;
  long double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
  return static_cast<double>(num / den);
}

struct PcaOracle {
  std::array<double, 2> eigenvalues{};
  double total = 0;
  std::vector<std::array<double, 2>> coords;  // per assessor
  std::array<Eigen::VectorXd, 2> loadings;
};

// Observations are assessors (columns of x), dimensions are subjects. The
// covariance is formed over subjects (n x n) and decomposed with Eigen.
inline PcaOracle pca(const Grid& x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto k = static_cast<Eigen::Index>(x.front().size());
  Eigen::MatrixXd obs(k, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) obs(j, i) = x[i][j];
  }
  Eigen::RowVectorXd mean = obs.colwise().mean();
  obs.rowwise() -= mean;
  Eigen::MatrixXd cov = obs.transpose() * obs / static_cast<double>(k - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  PcaOracle o;
  o.total = cov.trace();
  for (int c = 0; c < 2; ++c) {
    o.eigenvalues[c] = solver.eigenvalues()(n - 1 - c);
    o.loadings[c] = solver.eigenvectors().col(n - 1 - c);
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    o.coords.push_back({obs.row(j).dot(o.loadings[0]), obs.row(j).dot(o.loadings[1])});
  }
  return o;
}

struct LevelOracle {
  std::size_t count = 0;
  double median = 0, q1 = 0, q3 = 0, min = 0, max = 0;
};

inline double type7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  double h = (v.size() - 1) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

inline std::map<int, LevelOracle> level_differences(const std::vector<double>& predicted,
                                                    const std::vector<double>& reference) {
  std::map<int, std::vector<double>> groups;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    int level = static_cast<int>(std::floor(reference[i] + 0.5));
    groups[level].push_back(predicted[i] - reference[i]);
  }
  std::map<int, LevelOracle> out;
  for (auto& [level, d] : groups) {
    LevelOracle o;
    o.count = d.size();
    o.median = type7(d, 0.5);
    o.q1 = type7(d, 0.25);
    o.q3 = type7(d, 0.75);
    o.min = *std::min_element(d.begin(), d.end());
    o.max = *std::max_element(d.begin(), d.end());
    out[level] = o;
  }
  return out;
}

}  // namespace psci::oracle
