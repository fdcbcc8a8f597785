#pragma once

#include <cstddef>
#include <vector>

#include "psci/rating_matrix.hpp"

namespace psci {

// Dense subjects x assessors grid of real scores, row-major.
struct ScoreGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  ScoreGrid() = default;
  ScoreGrid(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Throws Error(insufficient_data) when any cell is missing.
ScoreGrid to_grid(const RatingMatrix& complete);

}  // namespace psci
