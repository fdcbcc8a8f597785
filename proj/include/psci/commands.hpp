#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psci/error.hpp"
#include "psci/http_transport.hpp"
#include "psci/llm_client.hpp"
#include "psci/prompt.hpp"
#include "psci/report.hpp"

namespace psci {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitProvider = 3,
};

int exit_code_for(ErrorKind kind);

// Optional JSON config file. Every key is optional; unknown keys are
// rejected with schema_error.
//   { "provider": { "base_url", "model", "temperature", "timeout_s",
//                   "max_attempts", "backoff_base_s" },
//     "n_runs", "parallelism", "parse_retries", "outlier_threshold",
//     "pca_zscore" }
struct AppConfig {
  ProviderConfig provider;  // api_key always comes from the environment or a flag
  int n_runs = 10;
  int parallelism = 1;
  int parse_retry_limit = 2;
  double outlier_threshold = 2.0;
  bool pca_zscore = false;
};

AppConfig parse_config(const nlohmann::json& doc);
AppConfig load_config(const std::filesystem::path& path);

struct CommandIo {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  bool verbose = false;
};

// "all" or a comma-separated list of builtin model ids.
std::vector<ModelConfig> select_models(const std::string& spec);

// Commands report errors on io.err and return an exit code; they do not throw.

int cmd_rubric_show(std::optional<int> level, CommandIo& io);

// Writes one prompt_<model>_v<version>.txt per selected model.
int cmd_prompts_export(const std::string& models, const std::filesystem::path& out_dir, CommandIo& io);

struct FetchGsvOptions {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;  // cache root; files land in <out_dir>/gsv/
  std::string key;
  int parallelism = 4;
};

// Writes <manifest stem>.fetched.json next to the input manifest.
std::filesystem::path fetched_manifest_path(const std::filesystem::path& manifest);
int cmd_fetch_gsv(const FetchGsvOptions& options, HttpTransport& http, CommandIo& io);

struct AssessOptions {
  std::filesystem::path manifest;
  std::string models = "all";
  int n_runs = 10;
  int parallelism = 1;
  int parse_retry_limit = 2;
  std::filesystem::path store;
  bool fresh = false;
  bool assume_yes = false;  // skip the --fresh confirmation prompt
};

int cmd_assess(const AssessOptions& options, const LlmProvider& provider, CommandIo& io,
               const std::atomic<bool>* cancel = nullptr);

struct CollectOptions {
  std::filesystem::path manifest;
  std::filesystem::path ratings;
  std::string assessor_id;
  AssessorKind kind = AssessorKind::human_expert;
};

int cmd_collect_ratings(const CollectOptions& options, CommandIo& io);

struct EvaluateOptions {
  std::filesystem::path store;
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> ratings;  // defaults to the manifest's reference_ratings
  ReferenceMode reference = ReferenceMode::ground_truth;
  std::filesystem::path out = "report.json";
  double outlier_threshold = 2.0;
  bool exclude_outliers = false;
  bool pca_zscore = false;
  std::string provider;
  std::optional<std::string> generated_at;
};

int cmd_evaluate(const EvaluateOptions& options, CommandIo& io);

struct ReportOptions {
  std::filesystem::path report;
  std::string format = "text";  // text | csv | json
  std::optional<std::filesystem::path> out_dir;  // csv only; defaults to the report's directory
};

int cmd_report(const ReportOptions& options, CommandIo& io);

}  // namespace psci
