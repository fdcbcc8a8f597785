#include "psci/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "psci/error.hpp"
#include "psci/prompt.hpp"
#include "psci/runner.hpp"

namespace psci {

using nlohmann::json;

std::string_view to_string(ReferenceMode mode) {
  return mode == ReferenceMode::ground_truth ? "ground_truth" : "consensus";
}

std::optional<ReferenceMode> parse_reference_mode(std::string_view text) {
  if (text == "ground_truth" || text == "ground-truth") return ReferenceMode::ground_truth;
  if (text == "consensus") return ReferenceMode::consensus;
  return std::nullopt;
}

ReferenceSeries ground_truth_reference(const DatasetManifest& manifest,
                                       const std::vector<RatingRow>& rows) {
  ReferenceSeries out;
  for (const auto& image : manifest.images) {
    if (image.ground_truth) out[image.image_id] = image.ground_truth->value();
  }
  std::map<std::string, int> from_rows;
  for (const auto& row : rows) {
    if (row.kind != AssessorKind::ground_truth) continue;
    if (manifest.find(row.image_id) == nullptr) {
      throw Error(ErrorKind::unknown_image, row.image_id);
    }
    auto [it, inserted] = from_rows.emplace(row.image_id, row.rating.value());
    if (!inserted && it->second != row.rating.value()) {
      throw Error(ErrorKind::conflicting_rating, "ground truth for " + row.image_id);
    }
  }
  for (const auto& [id, value] : from_rows) out.emplace(id, value);
  return out;
}

namespace {

std::vector<std::string> ids_of_kind(const RatingMatrix& matrix, AssessorKind kind) {
  std::vector<std::string> out;
  for (const auto& a : matrix.assessors()) {
    if (a.kind == kind) out.push_back(a.id);
  }
  return out;
}

std::string joined_prompt_versions(const std::vector<AssessmentRecord>& records) {
  std::set<std::string> versions;
  for (const auto& r : records) versions.insert(r.prompt_version);
  if (versions.empty()) return std::string(kPromptVersion);
  std::string out;
  for (const auto& v : versions) {
    if (!out.empty()) out += ",";
    out += v;
  }
  return out;
}

IccSection icc_section(const RatingMatrix& matrix, const std::vector<std::string>& experts,
                       const std::optional<BestCombination>& best) {
  IccSection section;
  section.experts = experts;
  if (experts.size() < 2) {
    section.error = "fewer than 2 expert assessors";
    return section;
  }
  try {
    auto complete = complete_cases(matrix, experts);
    for (auto variant : {IccVariant::icc1, IccVariant::icc2, IccVariant::icc3}) {
      section.singles.push_back(icc(complete, variant));
    }
  } catch (const Error& e) {
    section.error = e.what();
  }
  if (best) {
    section.combinations = best->candidates;
  } else {
    try {
      section.combinations = best_expert_combination(matrix, experts).candidates;
    } catch (const Error& e) {
      if (section.error.empty()) section.error = e.what();
    }
  }
  return section;
}

PcaSection pca_section(const RatingMatrix& matrix, const ReferenceSeries& reference,
                       const std::set<std::string>& excluded, bool zscore) {
  PcaSection section;
  section.zscore = zscore;
  std::vector<std::size_t> cols;
  for (std::size_t a = 0; a < matrix.n_assessors(); ++a) {
    if (!excluded.contains(matrix.assessors()[a].id)) cols.push_back(a);
  }
  std::vector<std::size_t> rows;
  for (std::size_t s = 0; s < matrix.n_subjects(); ++s) {
    if (!reference.contains(matrix.subjects()[s])) continue;
    bool complete = true;
    for (auto c : cols) complete = complete && matrix.at(s, c).has_value();
    if (complete) rows.push_back(s);
  }
  section.n_subjects = rows.size();
  ScoreGrid grid(rows.size(), cols.size() + 1);
  std::vector<std::string> labels;
  for (auto c : cols) {
    labels.push_back(matrix.assessors()[c].id);
    section.groups.push_back(assessor_group(matrix.assessors()[c]));
  }
  labels.push_back("reference");
  section.groups.push_back("reference");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) grid(r, j) = matrix.at(rows[r], cols[j])->value();
    grid(r, cols.size()) = reference.at(matrix.subjects()[rows[r]]);
  }
  try {
    section.projection = pca_assessors(grid, labels, PcaOptions{zscore});
  } catch (const Error& e) {
    section.error = e.what();
    section.groups.clear();
    return section;
  }
  std::vector<std::string> order;
  std::map<std::string, Centroid> sums;
  for (std::size_t i = 0; i < section.groups.size(); ++i) {
    const auto& g = section.groups[i];
    auto [it, inserted] = sums.try_emplace(g, Centroid{g, 0.0, 0.0, 0});
    if (inserted) order.push_back(g);
    it->second.pc1 += section.projection->coordinates[i][0];
    it->second.pc2 += section.projection->coordinates[i][1];
    ++it->second.members;
  }
  for (const auto& g : order) {
    Centroid c = sums.at(g);
    c.pc1 /= static_cast<double>(c.members);
    c.pc2 /= static_cast<double>(c.members);
    section.centroids.push_back(c);
  }
  return section;
}

DistributionRow distribution_row(std::string series, const std::vector<int>& values) {
  DistributionRow row;
  row.series = std::move(series);
  row.n = values.size();
  row.percent = rating_distribution(values);
  return row;
}

std::vector<int> column_values(const RatingMatrix& matrix, const std::vector<std::size_t>& cols) {
  std::vector<int> out;
  for (auto c : cols) {
    for (std::size_t s = 0; s < matrix.n_subjects(); ++s) {
      if (const auto& cell = matrix.at(s, c)) out.push_back(cell->value());
    }
  }
  return out;
}

}  // namespace

EvaluationReport evaluate(const DatasetManifest& manifest,
                          const std::vector<AssessmentRecord>& records,
                          const std::vector<RatingRow>& human_rows,
                          const EvaluationOptions& options) {
  std::vector<RatingRow> assessor_rows;
  for (const auto& row : human_rows) {
    if (row.kind != AssessorKind::ground_truth) assessor_rows.push_back(row);
  }
  const RatingMatrix matrix = merge_human_ratings(records_to_matrix(records, manifest), assessor_rows);
  const auto experts = ids_of_kind(matrix, AssessorKind::human_expert);

  EvaluationReport report;
  report.dataset_id = manifest.dataset_id;
  report.reference.mode = options.reference;
  report.outlier_threshold = options.outlier_threshold;
  report.exclude_outliers = options.exclude_outliers;
  report.prompt_version = joined_prompt_versions(records);
  report.provider = options.provider;
  report.generated_at = options.generated_at.value_or(utc_timestamp_now());

  ReferenceSeries reference;
  std::optional<BestCombination> best;
  if (options.reference == ReferenceMode::ground_truth) {
    reference = ground_truth_reference(manifest, human_rows);
    if (reference.empty()) {
      throw Error(ErrorKind::missing_reference, "no ground truth in manifest or ratings");
    }
  } else {
    if (experts.size() < 2) {
      throw Error(ErrorKind::missing_reference, "consensus needs at least 2 expert assessors");
    }
    try {
      best = best_expert_combination(matrix, experts);
    } catch (const Error& e) {
      throw Error(ErrorKind::missing_reference, std::string("no usable expert combination: ") + e.what());
    }
    reference = consensus(matrix, best->assessors);
    report.reference.combination = best->assessors;
    report.reference.combination_icc3 = best->icc3;
  }
  report.reference.n_subjects = reference.size();

  std::vector<std::pair<std::string, double>> maes;
  for (std::size_t a = 0; a < matrix.n_assessors(); ++a) {
    const auto& id = matrix.assessors()[a];
    AssessorMetricsRow row;
    row.assessor_id = id.id;
    row.kind = id.kind;
    row.group = assessor_group(id);
    auto series = pair_with_reference(matrix, a, reference);
    if (series.n() > 0) {
      row.metrics = agreement(series);
      maes.emplace_back(id.id, row.metrics->mae);
    } else {
      report.warnings.push_back(id.id + ": no ratings paired with the reference");
    }
    report.assessors.push_back(std::move(row));
  }
  report.outliers = flag_outliers(maes, options.outlier_threshold);
  const std::set<std::string> flagged(report.outliers.begin(), report.outliers.end());
  std::set<std::string> excluded;
  if (options.exclude_outliers) excluded = flagged;
  for (auto& row : report.assessors) {
    row.flagged = flagged.contains(row.assessor_id);
    row.excluded = excluded.contains(row.assessor_id);
  }

  report.groups = pooled_model_metrics(matrix, reference, excluded);
  report.icc = icc_section(matrix, experts, best);
  report.pca = pca_section(matrix, reference, excluded, options.pca_zscore);
  if (!report.pca.error.empty()) report.warnings.push_back("pca: " + report.pca.error);
  if (!report.icc.error.empty()) report.warnings.push_back("icc: " + report.icc.error);

  // Distributions and level differences per group, then per human assessor.
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<std::size_t>> group_cols;
  for (std::size_t a = 0; a < matrix.n_assessors(); ++a) {
    const auto& id = matrix.assessors()[a];
    if (excluded.contains(id.id)) continue;
    auto g = assessor_group(id);
    auto [it, inserted] = group_cols.try_emplace(g);
    if (inserted) group_order.push_back(g);
    it->second.push_back(a);
  }
  for (const auto& g : group_order) {
    report.distributions.push_back(distribution_row(g, column_values(matrix, group_cols.at(g))));
    auto pooled = pool_with_reference(matrix, group_cols.at(g), reference);
    if (pooled.n() > 0) report.level_differences.push_back({g, level_differences(pooled)});
  }
  for (std::size_t a = 0; a < matrix.n_assessors(); ++a) {
    const auto& id = matrix.assessors()[a];
    if (!is_human(id.kind) || excluded.contains(id.id)) continue;
    report.distributions.push_back(distribution_row(id.id, column_values(matrix, {a})));
  }
  if (options.reference == ReferenceMode::ground_truth) {
    std::vector<int> truth;
    for (const auto& [image, value] : reference) truth.push_back(static_cast<int>(value));
    report.distributions.push_back(distribution_row("reference", truth));
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json metrics_json(const AgreementMetrics& m) {
  json j{{"n", m.n}, {"mae", m.mae}, {"mse", m.mse}};
  j["pearson"] = m.pearson ? json(*m.pearson) : json(nullptr);
  j["pearson_error"] = m.pearson_error;
  return j;
}

AgreementMetrics metrics_from(const json& j) {
  AgreementMetrics m;
  m.n = j.at("n").get<std::size_t>();
  m.mae = j.at("mae").get<double>();
  m.mse = j.at("mse").get<double>();
  if (!j.at("pearson").is_null()) m.pearson = j.at("pearson").get<double>();
  m.pearson_error = j.at("pearson_error").get<std::string>();
  return m;
}

json icc_json(const IccResult& r) {
  return json{{"variant", to_string(r.variant)},
              {"single", r.single},
              {"mean_raters", r.mean_raters},
              {"n_subjects", r.n_subjects},
              {"k_raters", r.k_raters}};
}

IccResult icc_from(const json& j) {
  IccResult r;
  auto v = j.at("variant").get<std::string>();
  if (v == "icc1") {
    r.variant = IccVariant::icc1;
  } else if (v == "icc2") {
    r.variant = IccVariant::icc2;
  } else if (v == "icc3") {
    r.variant = IccVariant::icc3;
  } else {
    throw Error(ErrorKind::schema_error, "icc variant: " + v);
  }
  r.single = j.at("single").get<double>();
  r.mean_raters = j.at("mean_raters").get<double>();
  r.n_subjects = j.at("n_subjects").get<std::size_t>();
  r.k_raters = j.at("k_raters").get<std::size_t>();
  return r;
}

json optional_icc(const std::optional<IccResult>& r) { return r ? icc_json(*r) : json(nullptr); }

std::optional<IccResult> optional_icc_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return icc_from(j);
}

json level_stats_json(const LevelDifferenceStats& stats) {
  json levels = json::array();
  for (const auto& l : stats.levels) {
    levels.push_back({{"level", l.level},
                      {"count", l.count},
                      {"median", l.median},
                      {"q1", l.q1},
                      {"q3", l.q3},
                      {"min", l.min},
                      {"max", l.max}});
  }
  return levels;
}

LevelDifferenceStats level_stats_from(const json& j) {
  LevelDifferenceStats stats;
  if (!j.is_array() || j.size() != stats.levels.size()) {
    throw Error(ErrorKind::schema_error, "levels: expected 10 entries");
  }
  for (std::size_t i = 0; i < stats.levels.size(); ++i) {
    auto& l = stats.levels[i];
    const auto& e = j[i];
    l.level = e.at("level").get<int>();
    l.count = e.at("count").get<std::size_t>();
    l.median = e.at("median").get<double>();
    l.q1 = e.at("q1").get<double>();
    l.q3 = e.at("q3").get<double>();
    l.min = e.at("min").get<double>();
    l.max = e.at("max").get<double>();
  }
  return stats;
}

json pca_json(const PcaSection& pca) {
  json j{{"n_subjects", pca.n_subjects}, {"zscore", pca.zscore}, {"error", pca.error}};
  if (!pca.projection) {
    j["projection"] = nullptr;
  } else {
    const auto& p = *pca.projection;
    json points = json::array();
    for (std::size_t i = 0; i < p.assessors.size(); ++i) {
      points.push_back({{"assessor", p.assessors[i]},
                        {"group", pca.groups.at(i)},
                        {"pc1", p.coordinates[i][0]},
                        {"pc2", p.coordinates[i][1]}});
    }
    j["projection"] = {{"points", points},
                       {"explained_variance", p.explained_variance},
                       {"eigenvalues", p.eigenvalues},
                       {"total_variance", p.total_variance},
                       {"loadings", p.loadings}};
  }
  json centroids = json::array();
  for (const auto& c : pca.centroids) {
    centroids.push_back({{"group", c.group}, {"pc1", c.pc1}, {"pc2", c.pc2}, {"members", c.members}});
  }
  j["centroids"] = centroids;
  return j;
}

PcaSection pca_from(const json& j) {
  PcaSection pca;
  pca.n_subjects = j.at("n_subjects").get<std::size_t>();
  pca.zscore = j.at("zscore").get<bool>();
  pca.error = j.at("error").get<std::string>();
  const auto& pj = j.at("projection");
  if (!pj.is_null()) {
    PcaProjection p;
    for (const auto& point : pj.at("points")) {
      p.assessors.push_back(point.at("assessor").get<std::string>());
      pca.groups.push_back(point.at("group").get<std::string>());
      p.coordinates.push_back({point.at("pc1").get<double>(), point.at("pc2").get<double>()});
    }
    p.explained_variance = pj.at("explained_variance").get<std::array<double, 2>>();
    p.eigenvalues = pj.at("eigenvalues").get<std::array<double, 2>>();
    p.total_variance = pj.at("total_variance").get<double>();
    p.loadings = pj.at("loadings").get<std::array<std::vector<double>, 2>>();
    pca.projection = std::move(p);
  }
  for (const auto& c : j.at("centroids")) {
    pca.centroids.push_back({c.at("group").get<std::string>(), c.at("pc1").get<double>(),
                             c.at("pc2").get<double>(), c.at("members").get<std::size_t>()});
  }
  return pca;
}

}  // namespace

json report_to_json(const EvaluationReport& report) {
  json j;
  j["dataset_id"] = report.dataset_id;
  j["reference"] = {{"mode", to_string(report.reference.mode)},
                    {"combination", report.reference.combination},
                    {"combination_icc3", optional_icc(report.reference.combination_icc3)},
                    {"n_subjects", report.reference.n_subjects}};
  json assessors = json::array();
  for (const auto& row : report.assessors) {
    assessors.push_back({{"assessor_id", row.assessor_id},
                         {"kind", to_string(row.kind)},
                         {"group", row.group},
                         {"metrics", row.metrics ? metrics_json(*row.metrics) : json(nullptr)},
                         {"flagged", row.flagged},
                         {"excluded", row.excluded}});
  }
  j["assessors"] = assessors;
  json groups = json::array();
  for (const auto& g : report.groups) {
    groups.push_back({{"group", g.group}, {"members", g.members}, {"metrics", metrics_json(g.metrics)}});
  }
  j["groups"] = groups;
  json singles = json::array();
  for (const auto& r : report.icc.singles) singles.push_back(icc_json(r));
  json combos = json::array();
  for (const auto& c : report.icc.combinations) {
    combos.push_back({{"assessors", c.assessors}, {"icc3", optional_icc(c.icc3)}, {"warning", c.warning}});
  }
  j["icc"] = {{"experts", report.icc.experts},
              {"singles", singles},
              {"combinations", combos},
              {"error", report.icc.error}};
  j["pca"] = pca_json(report.pca);
  json dists = json::array();
  for (const auto& d : report.distributions) {
    dists.push_back({{"series", d.series}, {"n", d.n}, {"percent", d.percent}});
  }
  j["distributions"] = dists;
  json diffs = json::array();
  for (const auto& d : report.level_differences) {
    diffs.push_back({{"model", d.model}, {"levels", level_stats_json(d.stats)}});
  }
  j["level_differences"] = diffs;
  j["outlier_threshold"] = report.outlier_threshold;
  j["exclude_outliers"] = report.exclude_outliers;
  j["outliers"] = report.outliers;
  j["prompt_version"] = report.prompt_version;
  j["provider"] = report.provider;
  j["generated_at"] = report.generated_at;
  j["warnings"] = report.warnings;
  return j;
}

EvaluationReport report_from_json(const json& j) {
  try {
    EvaluationReport report;
    report.dataset_id = j.at("dataset_id").get<std::string>();
    const auto& ref = j.at("reference");
    auto mode = parse_reference_mode(ref.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorKind::schema_error, "reference.mode: unknown value");
    report.reference.mode = *mode;
    report.reference.combination = ref.at("combination").get<std::vector<std::string>>();
    report.reference.combination_icc3 = optional_icc_from(ref.at("combination_icc3"));
    report.reference.n_subjects = ref.at("n_subjects").get<std::size_t>();
    for (const auto& a : j.at("assessors")) {
      AssessorMetricsRow row;
      row.assessor_id = a.at("assessor_id").get<std::string>();
      auto kind = parse_assessor_kind(a.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorKind::schema_error, "assessors.kind: unknown value");
      row.kind = *kind;
      row.group = a.at("group").get<std::string>();
      if (!a.at("metrics").is_null()) row.metrics = metrics_from(a.at("metrics"));
      row.flagged = a.at("flagged").get<bool>();
      row.excluded = a.at("excluded").get<bool>();
      report.assessors.push_back(std::move(row));
    }
    for (const auto& g : j.at("groups")) {
      report.groups.push_back(
          {g.at("group").get<std::string>(), g.at("members").get<std::size_t>(), metrics_from(g.at("metrics"))});
    }
    const auto& icc = j.at("icc");
    report.icc.experts = icc.at("experts").get<std::vector<std::string>>();
    for (const auto& s : icc.at("singles")) report.icc.singles.push_back(icc_from(s));
    for (const auto& c : icc.at("combinations")) {
      report.icc.combinations.push_back({c.at("assessors").get<std::vector<std::string>>(),
                                         optional_icc_from(c.at("icc3")), c.at("warning").get<std::string>()});
    }
    report.icc.error = icc.at("error").get<std::string>();
    report.pca = pca_from(j.at("pca"));
    for (const auto& d : j.at("distributions")) {
      report.distributions.push_back({d.at("series").get<std::string>(), d.at("n").get<std::size_t>(),
                                      d.at("percent").get<std::array<double, 10>>()});
    }
    for (const auto& d : j.at("level_differences")) {
      report.level_differences.push_back({d.at("model").get<std::string>(), level_stats_from(d.at("levels"))});
    }
    report.outlier_threshold = j.at("outlier_threshold").get<double>();
    report.exclude_outliers = j.at("exclude_outliers").get<bool>();
    report.outliers = j.at("outliers").get<std::vector<std::string>>();
    report.prompt_version = j.at("prompt_version").get<std::string>();
    report.provider = j.at("provider").get<std::string>();
    report.generated_at = j.at("generated_at").get<std::string>();
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema_error, std::string("report: ") + e.what());
  }
}

void save_report(const EvaluationReport& report, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
    out << report_to_json(report).dump(2) << '\n';
    if (!out.flush()) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot write " + path.string() + ": " + ec.message());
}

EvaluationReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema_error, std::string("report: ") + e.what());
  }
  return report_from_json(doc);
}

// ---------------------------------------------------------------------------
// Tables

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string render_mae_box_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "group,assessor_id,kind,n,mae,mse,pearson,flagged,excluded\n";
  for (const auto& row : report.assessors) {
    out << csv_escape(row.group) << ',' << csv_escape(row.assessor_id) << ',' << to_string(row.kind) << ',';
    if (row.metrics) {
      out << row.metrics->n << ',' << num(row.metrics->mae) << ',' << num(row.metrics->mse) << ','
          << (row.metrics->pearson ? num(*row.metrics->pearson) : "");
    } else {
      out << "0,,,";
    }
    out << ',' << (row.flagged ? 1 : 0) << ',' << (row.excluded ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string render_pca_coords_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "label,group,point,pc1,pc2\n";
  const auto& pca = report.pca;
  if (pca.projection) {
    for (std::size_t i = 0; i < pca.projection->assessors.size(); ++i) {
      out << csv_escape(pca.projection->assessors[i]) << ',' << csv_escape(pca.groups.at(i)) << ",assessor,"
          << num(pca.projection->coordinates[i][0]) << ',' << num(pca.projection->coordinates[i][1]) << '\n';
    }
  }
  for (const auto& c : pca.centroids) {
    out << csv_escape(c.group) << ',' << csv_escape(c.group) << ",centroid," << num(c.pc1) << ',' << num(c.pc2)
        << '\n';
  }
  return out.str();
}

std::string render_distribution_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "series,n,level,percent\n";
  for (const auto& d : report.distributions) {
    for (std::size_t i = 0; i < d.percent.size(); ++i) {
      out << csv_escape(d.series) << ',' << d.n << ',' << (i + 1) << ',' << num(d.percent[i]) << '\n';
    }
  }
  return out.str();
}

std::string render_level_diff_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "model,level,count,median,q1,q3,min,max\n";
  for (const auto& d : report.level_differences) {
    for (const auto& l : d.stats.levels) {
      out << csv_escape(d.model) << ',' << l.level << ',' << l.count;
      if (l.empty()) {
        out << ",,,,,\n";
      } else {
        out << ',' << num(l.median) << ',' << num(l.q1) << ',' << num(l.q3) << ',' << num(l.min) << ','
            << num(l.max) << '\n';
      }
    }
  }
  return out.str();
}

std::string render_summary_table(const EvaluationReport& report) {
  std::vector<const GroupMetrics*> rows;
  for (const auto& g : report.groups) rows.push_back(&g);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GroupMetrics* a, const GroupMetrics* b) { return a->metrics.mae < b->metrics.mae; });
  std::size_t width = 5;
  for (const auto* g : rows) width = std::max(width, g->group.size());
  std::ostringstream out;
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size() + 2, ' '); };
  out << pad("Model") << "MAE     MSE     Correlation\n";
  for (const auto* g : rows) {
    out << pad(g->group) << fixed(g->metrics.mae) << "  " << fixed(g->metrics.mse) << "  "
        << (g->metrics.pearson ? fixed(*g->metrics.pearson) : "n/a (" + g->metrics.pearson_error + ")") << '\n';
  }
  return out.str();
}

}  // namespace psci
