#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "psci/rubric.hpp"

namespace psci {

// Bumped whenever any canonical prompt wording changes. Recorded in every
// assessment record.
inline constexpr std::string_view kPromptVersion = "1";

inline constexpr std::string_view kImagePlaceholder = "<<IMAGE>>";
inline constexpr std::string_view kDelimiter = "\"\"\"";
inline constexpr std::string_view kSectionPrefix = "### ";
inline constexpr std::string_view kOutputContract =
    "Reply with a single integer from 1 to 10 and nothing else. Do not show your reasoning.";
inline constexpr std::string_view kCorrectiveFollowUp = "Reply with one integer from 1 to 10 only.";

// How heavily each prompting strategy is applied.
struct StrategyIntensity {
  int s1_persona = 0;        // 0-2
  int s2_detail = 0;         // 0-4
  int s3_delimiters = 0;     // 0-1
  int s4_steps = 0;          // 0-4
  int s5_comprehensive = 0;  // 0-1

  bool operator==(const StrategyIntensity&) const = default;
};

// Throws Error(schema_error) naming the out-of-range field.
void validate_intensity(const StrategyIntensity& intensity);

struct ModelConfig {
  std::string model_id;
  StrategyIntensity intensity;
  std::string output_instruction = std::string(kOutputContract);

  bool operator==(const ModelConfig&) const = default;
};

// model1..model5, ordered by increasing prompt sophistication.
const std::vector<ModelConfig>& builtin_model_configs();
// Throws Error(usage_error) for an unknown id.
const ModelConfig& builtin_model_config(std::string_view model_id);

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  std::string delimiter_token = std::string(kDelimiter);

  bool operator==(const PromptBundle&) const = default;
};

PromptBundle render_prompt(const ModelConfig& config, const PsciRubric& rubric);

// Section names in the order they occur ("CRITERIA", "IMAGE", ...).
std::vector<std::string> section_headers(const PromptBundle& bundle);

struct StructureCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Named checks: persona_present, steps_present, delimiters_fenced,
// output_contract_present, image_placeholder_count.
std::vector<StructureCheck> assert_structure(const PromptBundle& bundle, const ModelConfig& config);
bool all_passed(const std::vector<StructureCheck>& checks);

// prompt_<model_id>_v<version>.txt, e.g. prompt_model5_v1.txt.
std::string prompt_file_name(const ModelConfig& config);
// Audit export format: system text and user text under labeled rulers.
std::string format_prompt_file(const PromptBundle& bundle);

}  // namespace psci
