#include "psci/rating_matrix.hpp"

#include <unordered_set>

#include "psci/error.hpp"

namespace psci {

RatingMatrix::RatingMatrix(std::vector<std::string> subjects, std::vector<AssessorId> assessors,
                           std::vector<Cell> cells)
    : subjects_(std::move(subjects)), assessors_(std::move(assessors)), cells_(std::move(cells)) {
  if (cells_.size() != subjects_.size() * assessors_.size()) {
    throw Error(ErrorKind::schema_error, "cell count does not match subjects x assessors");
  }
  std::unordered_set<std::string> seen;
  for (const auto& a : assessors_) {
    if (!seen.insert(a.id).second) {
      throw Error(ErrorKind::schema_error, "duplicate assessor id " + a.id);
    }
  }
}

RatingMatrix::RatingMatrix(std::vector<std::string> subjects, std::vector<AssessorId> assessors)
    : RatingMatrix(subjects, assessors, std::vector<Cell>(subjects.size() * assessors.size())) {}

const Cell& RatingMatrix::at(std::size_t subject, std::size_t assessor) const {
  return cells_.at(subject * assessors_.size() + assessor);
}

void RatingMatrix::set(std::size_t subject, std::size_t assessor, Cell value) {
  cells_.at(subject * assessors_.size() + assessor) = value;
}

std::optional<std::size_t> RatingMatrix::subject_index(const std::string& image_id) const {
  for (std::size_t i = 0; i < subjects_.size(); ++i) {
    if (subjects_[i] == image_id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> RatingMatrix::assessor_index(const std::string& assessor_id) const {
  for (std::size_t j = 0; j < assessors_.size(); ++j) {
    if (assessors_[j].id == assessor_id) return j;
  }
  return std::nullopt;
}

std::vector<Cell> RatingMatrix::column(std::size_t assessor) const {
  std::vector<Cell> out;
  out.reserve(subjects_.size());
  for (std::size_t i = 0; i < subjects_.size(); ++i) out.push_back(at(i, assessor));
  return out;
}

void RatingMatrix::append_column(AssessorId assessor, std::vector<Cell> column) {
  if (column.size() != subjects_.size()) {
    throw Error(ErrorKind::schema_error, "column length does not match subject count");
  }
  if (assessor_index(assessor.id)) {
    throw Error(ErrorKind::schema_error, "duplicate assessor id " + assessor.id);
  }
  const std::size_t k = assessors_.size();
  std::vector<Cell> cells;
  cells.reserve(subjects_.size() * (k + 1));
  for (std::size_t i = 0; i < subjects_.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) cells.push_back(at(i, j));
    cells.push_back(column[i]);
  }
  assessors_.push_back(std::move(assessor));
  cells_ = std::move(cells);
}

RatingMatrix complete_cases(const RatingMatrix& matrix, const std::vector<std::string>& selected) {
  std::vector<std::size_t> cols;
  std::vector<AssessorId> assessors;
  for (const auto& id : selected) {
    auto j = matrix.assessor_index(id);
    if (!j) throw Error(ErrorKind::unknown_assessor, id);
    cols.push_back(*j);
    assessors.push_back(matrix.assessors()[*j]);
  }
  std::vector<std::string> subjects;
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < matrix.n_subjects(); ++i) {
    bool complete = true;
    for (auto j : cols) complete = complete && matrix.at(i, j).has_value();
    if (!complete) continue;
    subjects.push_back(matrix.subjects()[i]);
    for (auto j : cols) cells.push_back(matrix.at(i, j));
  }
  if (subjects.empty() || cols.empty()) {
    throw Error(ErrorKind::empty_result, "no subject is rated by every selected assessor");
  }
  return RatingMatrix(std::move(subjects), std::move(assessors), std::move(cells));
}

RatingMatrix complete_cases(const RatingMatrix& matrix) {
  std::vector<std::string> ids;
  for (const auto& a : matrix.assessors()) ids.push_back(a.id);
  return complete_cases(matrix, ids);
}

}  // namespace psci
