#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psci {

inline constexpr std::string_view kRubricVersion = "psci-asphalt-2014/1";

// Coarse descriptor for programmatic filtering. Prompts always render the
// original text instead.
enum class Condition {
  excellent,
  very_good,
  good,
  fair,
  poor,
  very_poor,
  failed,
  none,
};

std::string_view to_string(Condition condition);

struct PsciLevel {
  int level = 0;
  std::string primary_indicators;
  std::string secondary_indicators;
  std::string treatment;
  Condition surface_condition = Condition::none;
  Condition structure_condition = Condition::none;
  std::string surface_text;
  std::string structure_text;

  bool operator==(const PsciLevel&) const = default;
};

// Ten levels ordered 10 down to 1.
class PsciRubric {
 public:
  explicit PsciRubric(std::vector<PsciLevel> levels);

  const std::vector<PsciLevel>& levels() const noexcept { return levels_; }
  const PsciLevel& level(int rating) const;

  bool operator==(const PsciRubric&) const = default;

 private:
  std::vector<PsciLevel> levels_;
};

// Asphalt pavement rating standard with treatment measures. Cells that the
// source table leaves blank (level 9 treatment and conditions) stay empty.
const PsciRubric& builtin_psci_rubric();

// Plain-text rendering used by `psci-rater rubric`.
std::string format_rubric(const PsciRubric& rubric, std::optional<int> only_level = {});

}  // namespace psci
