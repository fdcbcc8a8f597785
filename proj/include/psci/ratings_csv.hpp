#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "psci/rating.hpp"

namespace psci {

// One row of image_id,assessor_id,assessor_kind,rating.
struct RatingRow {
  std::string image_id;
  std::string assessor_id;
  AssessorKind kind = AssessorKind::human_expert;
  Rating rating = validate_rating(1);

  bool operator==(const RatingRow&) const = default;
};

inline constexpr const char* kRatingsHeader = "image_id,assessor_id,assessor_kind,rating";

// Throws schema_error with the offending line number.
std::vector<RatingRow> parse_ratings_csv(std::istream& in);
std::vector<RatingRow> read_ratings_csv(const std::filesystem::path& path);

void write_ratings_csv(std::ostream& out, const std::vector<RatingRow>& rows);
// Whole-file rewrite through a temporary and rename.
void write_ratings_csv(const std::filesystem::path& path, const std::vector<RatingRow>& rows);
// Creates the file with a header when absent. Flushes before returning.
void append_rating_row(const std::filesystem::path& path, const RatingRow& row);

// Minimal RFC 4180 field splitting (quoted fields with doubled quotes).
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);

}  // namespace psci
