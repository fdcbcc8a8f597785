#pragma once

#include <array>
#include <string>
#include <vector>

#include "psci/rating_matrix.hpp"
#include "psci/score_grid.hpp"

namespace psci {

struct PcaOptions {
  // Divide each centered subject dimension by its sample standard deviation
  // across assessors (dimensions with zero spread stay at zero).
  bool zscore = false;
};

// Assessors as observations, subjects as dimensions.
struct PcaProjection {
  std::vector<std::string> assessors;
  std::vector<std::array<double, 2>> coordinates;  // (pc1, pc2) per assessor
  std::array<double, 2> explained_variance{};      // fractions of total variance
  std::array<double, 2> eigenvalues{};             // covariance eigenvalues
  double total_variance = 0.0;
  std::array<std::vector<double>, 2> loadings;     // unit vectors over subjects

  bool operator==(const PcaProjection&) const = default;
};

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues descend; eigenvectors are the columns of `vectors` (row-major
// n x n).
struct SymmetricEigen {
  std::vector<double> values;
  std::vector<double> vectors;
};
SymmetricEigen jacobi_eigen(std::vector<double> matrix, std::size_t n);

// grid is subjects x assessors. Each subject dimension is centered by its
// mean across assessors. Each component is oriented so that its
// largest-magnitude loading is positive. Components with no variance get a
// zero eigenvalue and an arbitrary orthonormal loading.
// Throws insufficient_data for < 3 assessors or < 2 subjects.
PcaProjection pca_assessors(const ScoreGrid& grid, std::vector<std::string> assessors,
                            const PcaOptions& options = {});
PcaProjection pca_assessors(const RatingMatrix& complete, const PcaOptions& options = {});

}  // namespace psci
