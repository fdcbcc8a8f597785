#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace psci {

inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 10;

// An integer PSCI grade. Only constructible through validate_rating, so a
// Rating in hand is always within [1, 10].
class Rating {
 public:
  int value() const noexcept { return value_; }
  auto operator<=>(const Rating&) const = default;

 private:
  explicit constexpr Rating(int value) : value_(value) {}
  friend Rating validate_rating(int raw);
  int value_;
};

// Throws Error(out_of_range) when raw is outside [1, 10].
Rating validate_rating(int raw);

enum class AssessorKind {
  human_expert,
  human_intermediate,
  human_novice,
  model_run,
  ground_truth,
  consensus,
};

std::string_view to_string(AssessorKind kind);
std::optional<AssessorKind> parse_assessor_kind(std::string_view text);
bool is_human(AssessorKind kind);

struct AssessorId {
  std::string id;
  AssessorKind kind = AssessorKind::human_expert;
  // Set only for model_run assessors.
  std::string model_id;
  int run_index = -1;

  static AssessorId human(std::string id, AssessorKind kind);
  // Identity is "<model_id>#r<run_index>", stable across resumed runs.
  static AssessorId model_run(const std::string& model_id, int run_index);

  bool operator==(const AssessorId&) const = default;
};

// Group label used for pooled summaries: the model id for model runs, the
// kind name otherwise.
std::string assessor_group(const AssessorId& assessor);

}  // namespace psci
