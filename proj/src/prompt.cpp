#include "psci/prompt.hpp"

#include <sstream>

#include "psci/error.hpp"

namespace psci {

namespace {

constexpr std::string_view kPersonaBase =
    "You are a pavement engineer who rates road surface condition from photographs using the "
    "Pavement Surface Condition Index (PSCI).";
constexpr std::string_view kPersonaDetail =
    " You are certified in visual pavement condition surveys, have more than five years of "
    "field experience rating asphalt roads, and apply the PSCI rating manual for flexible "
    "pavements precisely and consistently.";
constexpr std::string_view kPersonaMarker = "You are a pavement engineer";

struct Step {
  std::string_view text;
  std::string_view elaboration;
};

constexpr Step kSteps[] = {
    {"Read the grading criteria in the CRITERIA section.",
     "Note the indicator thresholds that separate neighbouring grades."},
    {"Examine the attached image, looking only at the asphalt pavement.",
     "Disregard vehicles, verges, road markings, sky and buildings."},
    {"Identify every anomaly on the asphalt pavement: surface defects, pavement defects and "
     "structural distresses. Ignore marks that are only shadows or water stains.",
     "Check the wheel paths for rutting, the edges for breakup and any patches for their "
     "condition."},
    {"Estimate the proportion of the asphalt surface affected by each type of anomaly.",
     "Judge extent relative to the visible carriageway, not the whole image."},
    {"Determine the grade by matching your findings to the grading criteria.",
     "Start from the most severe distress category present, then compare the secondary "
     "indicators of the candidate grade and its neighbours before settling."},
    {"Answer with the grade as one integer, without explaining how you reached it.",
     "Output only the integer."},
};

class SectionWriter {
 public:
  explicit SectionWriter(bool fenced) : fenced_(fenced) {}

  void add(std::string_view name, const std::string& body) {
    out_ << kSectionPrefix << name << "\n";
    if (fenced_) out_ << kDelimiter << "\n";
    out_ << body;
    if (!body.empty() && body.back() != '\n') out_ << "\n";
    if (fenced_) out_ << kDelimiter << "\n";
    out_ << "\n";
  }

  std::string str() const {
    auto s = out_.str();
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s + "\n";
  }

 private:
  bool fenced_;
  std::ostringstream out_;
};

std::string criteria_body(const PsciRubric& rubric, int detail) {
  std::ostringstream out;
  out << "PSCI rating scale for asphalt pavement, from 10 (best) to 1 (worst):\n";
  for (const auto& level : rubric.levels()) {
    if (detail >= 2) {
      out << "PSCI " << level.level << "\n";
      out << "  Primary indicators: " << level.primary_indicators << "\n";
      out << "  Secondary indicators: " << level.secondary_indicators << "\n";
    } else {
      out << "PSCI " << level.level << ": " << level.primary_indicators << "\n";
    }
  }
  return out.str();
}

std::string anomalies_body() {
  return "Anomalies to look for on the asphalt pavement:\n"
         "- Surface defects: ravelling, bleeding.\n"
         "- Pavement defects: longitudinal cracks, transverse cracks.\n"
         "- Structural distresses: alligator cracks, rutting, potholes, surface distortion, "
         "edge breakup, patching.\n"
         "Apparent anomalies caused by shadows or water stains are excluded.\n";
}

std::string proportions_body() {
  return "Estimating extent:\n"
         "- Express each anomaly type as the approximate percentage of the visible asphalt "
         "surface it affects.\n"
         "- Ravelling or bleeding: compare with the 10% and 30% thresholds that separate PSCI "
         "9, 8 and 7.\n"
         "- Other cracking: compare with the 20% threshold that separates PSCI 6 and 5.\n"
         "- Rutting, alligator cracking or poor patching: compare with the 5%, 25% and 50% "
         "thresholds that separate PSCI 4, 3 and 2.\n"
         "- Count potholes and note whether edge breakup or cracking occurs in short or "
         "continuous lengths.\n"
         "- Grade from the most severe distress category present; use the secondary "
         "indicators to confirm.\n";
}

std::string procedure_body(int steps) {
  std::ostringstream out;
  int n = 1;
  for (const auto& step : kSteps) {
    out << n++ << ". " << step.text << "\n";
    if (steps >= 4) out << "   - " << step.elaboration << "\n";
  }
  return out.str();
}

std::string task_body(const StrategyIntensity& in) {
  std::string body;
  if (in.s2_detail >= 1) {
    body =
        "Rate the pavement surface condition of the road in the image on the PSCI scale above, "
        "where 10 is the best condition and 1 the worst.";
  } else {
    body = "Rate the road in the image.";
  }
  if (in.s4_steps >= 2) body += " Follow the steps in the PROCEDURE section.";
  if (in.s5_comprehensive >= 1) {
    body +=
        " Apply the criteria the same way to every image: base the grade only on visible "
        "evidence on the pavement, and when the evidence falls between two grades choose the "
        "grade whose primary indicators fit best.";
  }
  return body + "\n";
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

bool has_step_list(const std::string& text) {
  const auto lines = lines_of(text);
  std::size_t next = 1;
  for (const auto& line : lines) {
    if (line.rfind(std::to_string(next) + ". ", 0) == 0) ++next;
  }
  return next > 6;
}

bool is_fenced(const PromptBundle& bundle) {
  const auto lines = lines_of(bundle.user_text);
  std::size_t headers = 0;
  std::size_t fences = 0;
  bool open = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.rfind(kSectionPrefix, 0) == 0) {
      if (open) return false;
      ++headers;
      if (i + 1 >= lines.size() || lines[i + 1] != bundle.delimiter_token) return false;
    } else if (line == bundle.delimiter_token) {
      ++fences;
      open = !open;
    }
  }
  return headers > 0 && !open && fences == 2 * headers;
}

}  // namespace

void validate_intensity(const StrategyIntensity& in) {
  auto check = [](int v, int hi, const char* name) {
    if (v < 0 || v > hi) throw Error(ErrorKind::schema_error, std::string(name) + " out of range");
  };
  check(in.s1_persona, 2, "s1_persona");
  check(in.s2_detail, 4, "s2_detail");
  check(in.s3_delimiters, 1, "s3_delimiters");
  check(in.s4_steps, 4, "s4_steps");
  check(in.s5_comprehensive, 1, "s5_comprehensive");
}

const std::vector<ModelConfig>& builtin_model_configs() {
  static const std::vector<ModelConfig> configs = {
      {"model1", {0, 1, 1, 0, 1}},
      {"model2", {1, 1, 1, 0, 1}},
      {"model3", {1, 2, 1, 0, 1}},
      {"model4", {2, 3, 1, 2, 1}},
      {"model5", {2, 4, 1, 4, 1}},
  };
  return configs;
}

const ModelConfig& builtin_model_config(std::string_view model_id) {
  for (const auto& c : builtin_model_configs()) {
    if (c.model_id == model_id) return c;
  }
  throw Error(ErrorKind::usage_error, "unknown model '" + std::string(model_id) + "'");
}

PromptBundle render_prompt(const ModelConfig& config, const PsciRubric& rubric) {
  const auto& in = config.intensity;
  validate_intensity(in);

  PromptBundle bundle;
  if (in.s1_persona >= 1) {
    bundle.system_text = std::string(kPersonaBase);
    if (in.s1_persona >= 2) bundle.system_text += kPersonaDetail;
  }

  SectionWriter sections(in.s3_delimiters == 1);
  sections.add("CRITERIA", criteria_body(rubric, in.s2_detail));
  if (in.s2_detail >= 3) sections.add("ANOMALIES", anomalies_body());
  if (in.s2_detail >= 4) sections.add("PROPORTIONS", proportions_body());
  sections.add("IMAGE", "The road image is attached here: " + std::string(kImagePlaceholder) + "\n");
  if (in.s4_steps >= 2) sections.add("PROCEDURE", procedure_body(in.s4_steps));
  sections.add("TASK", task_body(in));
  sections.add("OUTPUT", config.output_instruction + "\n");
  bundle.user_text = sections.str();
  return bundle;
}

std::vector<std::string> section_headers(const PromptBundle& bundle) {
  std::vector<std::string> headers;
  for (const auto& line : lines_of(bundle.user_text)) {
    if (line.rfind(kSectionPrefix, 0) == 0) headers.push_back(line.substr(kSectionPrefix.size()));
  }
  return headers;
}

std::vector<StructureCheck> assert_structure(const PromptBundle& bundle, const ModelConfig& config) {
  const auto& in = config.intensity;
  std::vector<StructureCheck> checks;
  auto expect = [&](std::string name, bool actual, bool wanted) {
    checks.push_back({std::move(name), actual == wanted,
                      std::string("found=") + (actual ? "yes" : "no") +
                          " expected=" + (wanted ? "yes" : "no")});
  };

  const bool persona = bundle.system_text.find(kPersonaMarker) != std::string::npos ||
                       bundle.user_text.find(kPersonaMarker) != std::string::npos;
  expect("persona_present", persona, in.s1_persona >= 1);
  expect("steps_present", has_step_list(bundle.user_text), in.s4_steps >= 2);
  expect("delimiters_fenced", is_fenced(bundle), in.s3_delimiters == 1);
  expect("output_contract_present",
         !config.output_instruction.empty() &&
             bundle.user_text.find(config.output_instruction) != std::string::npos,
         true);

  const auto placeholders = count_occurrences(bundle.user_text, kImagePlaceholder) +
                            count_occurrences(bundle.system_text, kImagePlaceholder);
  checks.push_back({"image_placeholder_count", placeholders == 1,
                    "found=" + std::to_string(placeholders) + " expected=1"});
  return checks;
}

bool all_passed(const std::vector<StructureCheck>& checks) {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string prompt_file_name(const ModelConfig& config) {
  return "prompt_" + config.model_id + "_v" + std::string(kPromptVersion) + ".txt";
}

std::string format_prompt_file(const PromptBundle& bundle) {
  return "=== SYSTEM ===\n" + bundle.system_text + (bundle.system_text.empty() ? "" : "\n") +
         "=== USER ===\n" + bundle.user_text;
}

}  // namespace psci
