#include "psci/rating.hpp"

#include "psci/error.hpp"

namespace psci {

Rating validate_rating(int raw) {
  if (raw < kMinRating || raw > kMaxRating) {
    throw Error(ErrorKind::out_of_range, std::to_string(raw));
  }
  return Rating(raw);
}

std::string_view to_string(AssessorKind kind) {
  switch (kind) {
    case AssessorKind::human_expert: return "human_expert";
    case AssessorKind::human_intermediate: return "human_intermediate";
    case AssessorKind::human_novice: return "human_novice";
    case AssessorKind::model_run: return "model_run";
    case AssessorKind::ground_truth: return "ground_truth";
    case AssessorKind::consensus: return "consensus";
  }
  return "unknown";
}

std::optional<AssessorKind> parse_assessor_kind(std::string_view text) {
  for (auto kind : {AssessorKind::human_expert, AssessorKind::human_intermediate,
                    AssessorKind::human_novice, AssessorKind::model_run,
                    AssessorKind::ground_truth, AssessorKind::consensus}) {
    if (to_string(kind) == text) return kind;
  }
  // Short aliases accepted in hand-written CSVs.
  if (text == "expert") return AssessorKind::human_expert;
  if (text == "intermediate") return AssessorKind::human_intermediate;
  if (text == "novice") return AssessorKind::human_novice;
  return std::nullopt;
}

bool is_human(AssessorKind kind) {
  return kind == AssessorKind::human_expert ||
         kind == AssessorKind::human_intermediate ||
         kind == AssessorKind::human_novice;
}

AssessorId AssessorId::human(std::string id, AssessorKind kind) {
  AssessorId a;
  a.id = std::move(id);
  a.kind = kind;
  return a;
}

AssessorId AssessorId::model_run(const std::string& model_id, int run_index) {
  AssessorId a;
  a.id = model_id + "#r" + std::to_string(run_index);
  a.kind = AssessorKind::model_run;
  a.model_id = model_id;
  a.run_index = run_index;
  return a;
}

std::string assessor_group(const AssessorId& assessor) {
  if (assessor.kind == AssessorKind::model_run) return assessor.model_id;
  return std::string(to_string(assessor.kind));
}

}  // namespace psci
