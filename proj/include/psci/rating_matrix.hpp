#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "psci/rating.hpp"

namespace psci {

using Cell = std::optional<Rating>;

// Subjects (images) by assessors grid with missing cells. Row-major.
class RatingMatrix {
 public:
  RatingMatrix() = default;
  RatingMatrix(std::vector<std::string> subjects, std::vector<AssessorId> assessors,
               std::vector<Cell> cells);
  // All cells missing.
  RatingMatrix(std::vector<std::string> subjects, std::vector<AssessorId> assessors);

  std::size_t n_subjects() const noexcept { return subjects_.size(); }
  std::size_t n_assessors() const noexcept { return assessors_.size(); }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  const std::vector<AssessorId>& assessors() const noexcept { return assessors_; }

  const Cell& at(std::size_t subject, std::size_t assessor) const;
  void set(std::size_t subject, std::size_t assessor, Cell value);

  std::optional<std::size_t> subject_index(const std::string& image_id) const;
  std::optional<std::size_t> assessor_index(const std::string& assessor_id) const;

  std::vector<Cell> column(std::size_t assessor) const;
  // Throws Error(schema_error) when the id already exists or the column
  // length does not match the subject count.
  void append_column(AssessorId assessor, std::vector<Cell> column);

  bool operator==(const RatingMatrix&) const = default;

 private:
  std::vector<std::string> subjects_;
  std::vector<AssessorId> assessors_;
  std::vector<Cell> cells_;
};

// Restricts to the selected assessors (in selection order) and to subjects
// where all of them have a rating. Throws unknown_assessor for ids not in the
// matrix and empty_result when no subject is complete.
RatingMatrix complete_cases(const RatingMatrix& matrix, const std::vector<std::string>& selected);

// All assessors selected.
RatingMatrix complete_cases(const RatingMatrix& matrix);

}  // namespace psci
