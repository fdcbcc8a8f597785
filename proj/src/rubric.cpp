#include "psci/rubric.hpp"

#include <sstream>

#include "psci/error.hpp"

namespace psci {

std::string_view to_string(Condition condition) {
  switch (condition) {
    case Condition::excellent: return "excellent";
    case Condition::very_good: return "very_good";
    case Condition::good: return "good";
    case Condition::fair: return "fair";
    case Condition::poor: return "poor";
    case Condition::very_poor: return "very_poor";
    case Condition::failed: return "failed";
    case Condition::none: return "none";
  }
  return "none";
}

PsciRubric::PsciRubric(std::vector<PsciLevel> levels) : levels_(std::move(levels)) {
  if (levels_.size() != 10) {
    throw Error(ErrorKind::schema_error, "rubric must have exactly 10 levels");
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].level != 10 - static_cast<int>(i)) {
      throw Error(ErrorKind::schema_error, "rubric levels must run 10 down to 1");
    }
  }
}

const PsciLevel& PsciRubric::level(int rating) const {
  if (rating < 1 || rating > 10) throw Error(ErrorKind::out_of_range, std::to_string(rating));
  return levels_[static_cast<std::size_t>(10 - rating)];
}

namespace {

PsciRubric make_rubric() {
  using C = Condition;
  std::vector<PsciLevel> levels = {
      {10, "No visible defects", "Road surface in perfect condition", "Routine maintenance",
       C::excellent, C::very_good, "Excellent", "Very good"},
      {9, "Minor surface defects; ravelling or bleeding <10%",
       "Road surface in very good condition", "", C::none, C::none, "", ""},
      {8, "Moderate surface defects; ravelling or bleeding 10% to 30%",
       "Little or no other defects", "Resealing and restoration of", C::fair, C::good, "Fair",
       "Good"},
      {7, "Extensive surface defects; ravelling or bleeding >30%",
       "Little or no other defects; old surface with aged appearance", "Skid resistance",
       C::poor, C::good, "Poor", "Good"},
      {6,
       "Moderate other pavement defects; other cracking <20%; patching generally in good "
       "condition; surface distortion requiring some reduction in speed",
       "Surface defects may be present; no structural distress", "Surface restoration",
       C::fair, C::fair, "Fair", "Fair"},
      {5,
       "Significant other pavement defects; other cracking >20%; patching in fair condition; "
       "surface distortion requiring reduction in speed",
       "Surface defects may be present; very localized structural distress (< 5m² or a "
       "few isolated potholes)",
       "Carry out localized repairs and treat with surface treatment or thin overlay", C::poor,
       C::fair, "Poor", "Fair"},
      {4,
       "Structural distress present; rutting, alligator cracking or poor patching for 5% to "
       "25%; short lengths of edge breakup or cracking; frequent potholes",
       "Other defects may be present", "Structural overlay", C::poor, C::poor, "Poor overall",
       "Poor overall"},
      {3,
       "Significant areas of structural distress; rutting, alligator cracking or poor patching "
       "for 25% to 50%; continuous lengths with edge breakup or cracking; more frequent "
       "potholes",
       "Other defects may be present",
       "Required to strengthen road; localized patching and repairs are required prior to "
       "overlay",
       C::poor, C::poor, "Poor overall", "Poor overall"},
      {2,
       "Large areas of structural distress; rutting, alligator cracking or very poor patching "
       "for >50%; severe rutting (> 75 mm); extensive very poor patching; many potholes",
       "Very difficult to drive", "Road reconstruction", C::very_poor, C::very_poor,
       "Very poor overall", "Very poor overall"},
      {1,
       "Extensive structural distress; road disintegration of surface; pavement failure; many "
       "large and deep potholes; extensive failed patching",
       "Severe deterioration; virtually undriveable",
       "Needs full-depth reconstruction with extensive base repair", C::failed, C::failed,
       "Failed overall", "Failed overall"},
  };
  return PsciRubric(std::move(levels));
}

}  // namespace

const PsciRubric& builtin_psci_rubric() {
  static const PsciRubric rubric = make_rubric();
  return rubric;
}

std::string format_rubric(const PsciRubric& rubric, std::optional<int> only_level) {
  if (only_level && (*only_level < 1 || *only_level > 10)) {
    throw Error(ErrorKind::out_of_range, std::to_string(*only_level));
  }
  std::ostringstream out;
  for (const auto& level : rubric.levels()) {
    if (only_level && level.level != *only_level) continue;
    out << "PSCI " << level.level << "\n";
    out << "  Primary:   " << level.primary_indicators << "\n";
    out << "  Secondary: " << level.secondary_indicators << "\n";
    if (!level.treatment.empty()) out << "  Treatment: " << level.treatment << "\n";
    if (!level.surface_text.empty()) out << "  Surface:   " << level.surface_text << "\n";
    if (!level.structure_text.empty()) out << "  Structure: " << level.structure_text << "\n";
  }
  return out.str();
}

}  // namespace psci
