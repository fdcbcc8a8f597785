#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psci/icc.hpp"
#include "psci/manifest.hpp"
#include "psci/metrics.hpp"
#include "psci/pca.hpp"
#include "psci/ratings_csv.hpp"
#include "psci/run_store.hpp"

namespace psci {

enum class ReferenceMode { ground_truth, consensus };

std::string_view to_string(ReferenceMode mode);
std::optional<ReferenceMode> parse_reference_mode(std::string_view text);

struct ReferenceDescriptor {
  ReferenceMode mode = ReferenceMode::ground_truth;
  std::vector<std::string> combination;  // consensus only
  std::optional<IccResult> combination_icc3;
  std::size_t n_subjects = 0;

  bool operator==(const ReferenceDescriptor&) const = default;
};

struct AssessorMetricsRow {
  std::string assessor_id;
  AssessorKind kind = AssessorKind::human_expert;
  std::string group;
  std::optional<AgreementMetrics> metrics;  // absent when no subject pairs with the reference
  bool flagged = false;
  bool excluded = false;

  bool operator==(const AssessorMetricsRow&) const = default;
};

struct IccSection {
  std::vector<std::string> experts;
  std::vector<IccResult> singles;  // icc1, icc2, icc3 over all experts
  std::vector<CombinationIcc> combinations;
  std::string error;

  bool operator==(const IccSection&) const = default;
};

struct Centroid {
  std::string group;
  double pc1 = 0.0;
  double pc2 = 0.0;
  std::size_t members = 0;

  bool operator==(const Centroid&) const = default;
};

struct PcaSection {
  std::optional<PcaProjection> projection;
  std::vector<std::string> groups;  // parallel to projection->assessors
  std::vector<Centroid> centroids;
  std::size_t n_subjects = 0;
  bool zscore = false;
  std::string error;

  bool operator==(const PcaSection&) const = default;
};

struct DistributionRow {
  std::string series;
  std::size_t n = 0;
  std::array<double, 10> percent{};

  bool operator==(const DistributionRow&) const = default;
};

struct LevelDifferenceRow {
  std::string model;
  LevelDifferenceStats stats;

  bool operator==(const LevelDifferenceRow&) const = default;
};

struct EvaluationReport {
  std::string dataset_id;
  ReferenceDescriptor reference;
  std::vector<AssessorMetricsRow> assessors;
  std::vector<GroupMetrics> groups;
  IccSection icc;
  PcaSection pca;
  std::vector<DistributionRow> distributions;
  std::vector<LevelDifferenceRow> level_differences;
  double outlier_threshold = 2.0;
  bool exclude_outliers = false;
  std::vector<std::string> outliers;
  std::string prompt_version;
  std::string provider;
  std::string generated_at;
  std::vector<std::string> warnings;

  bool operator==(const EvaluationReport&) const = default;
};

struct EvaluationOptions {
  ReferenceMode reference = ReferenceMode::ground_truth;
  double outlier_threshold = 2.0;
  bool exclude_outliers = false;
  bool pca_zscore = false;
  std::string provider;
  std::optional<std::string> generated_at;  // defaults to now
};

// Reference from manifest ground truth, filled in by ground_truth rows of
// the ratings table where the manifest has none.
ReferenceSeries ground_truth_reference(const DatasetManifest& manifest,
                                       const std::vector<RatingRow>& rows);

// Builds the full report. Only a missing reference is fatal
// (missing_reference); degenerate statistics are recorded per section.
EvaluationReport evaluate(const DatasetManifest& manifest,
                          const std::vector<AssessmentRecord>& records,
                          const std::vector<RatingRow>& human_rows,
                          const EvaluationOptions& options);

nlohmann::json report_to_json(const EvaluationReport& report);
// Throws schema_error on malformed input.
EvaluationReport report_from_json(const nlohmann::json& doc);
void save_report(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport load_report(const std::filesystem::path& path);

// Plot-ready tables.
std::string render_mae_box_csv(const EvaluationReport& report);
std::string render_pca_coords_csv(const EvaluationReport& report);
std::string render_distribution_csv(const EvaluationReport& report);
std::string render_level_diff_csv(const EvaluationReport& report);
// Group rows (models and human groups) sorted by ascending MAE.
std::string render_summary_table(const EvaluationReport& report);

}  // namespace psci
