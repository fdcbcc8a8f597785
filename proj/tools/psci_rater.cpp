// psci-rater: rubric display, GSV fetching, LLM assessment runs, human rating
// entry, evaluation and report rendering.
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "psci/commands.hpp"
#include "psci/manifest.hpp"
#include "psci/mock_provider.hpp"
#include "psci/ratings_csv.hpp"

namespace {

std::atomic<bool> g_cancel{false};

extern "C" void on_interrupt(int) { g_cancel = true; }

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value ? value : "";
}

struct MockFlags {
  std::string mode;
  int fixed_value = 6;
  int delta = 0;
  double sigma = 0.0;
  int n_bad = 0;
  std::uint64_t seed = 0;
};

psci::LlmProvider build_mock(const MockFlags& flags, const psci::AssessOptions& options) {
  auto mode = psci::parse_mock_mode(flags.mode);
  if (!mode) throw psci::Error(psci::ErrorKind::usage_error, "unknown --mock mode " + flags.mode);
  psci::MockProviderSpec spec;
  spec.mode = *mode;
  spec.fixed_value = flags.fixed_value;
  spec.delta = flags.delta;
  spec.sigma = flags.sigma;
  spec.n_bad = flags.n_bad;
  spec.seed = flags.seed;
  auto manifest = psci::load_manifest(options.manifest);
  std::vector<psci::RatingRow> rows;
  if (manifest.reference_ratings && std::filesystem::exists(manifest.resolve(*manifest.reference_ratings))) {
    rows = psci::read_ratings_csv(manifest.resolve(*manifest.reference_ratings));
  }
  for (const auto& [id, value] : psci::ground_truth_reference(manifest, rows)) {
    spec.truth.emplace(id, psci::validate_rating(static_cast<int>(value)));
  }
  return psci::make_mock_provider(std::move(spec));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSCI pavement rating with vision language models"};
  app.require_subcommand(1);
  std::string config_path;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_flag("--verbose,-v", verbose, "Per-record progress on stderr");

  auto* rubric = app.add_subcommand("rubric", "Show the PSCI rating rubric");
  std::optional<int> level;
  rubric->add_option("--level", level, "Show a single level");

  auto* prompts = app.add_subcommand("prompts", "Export the rendered prompt of each model");
  std::string prompt_models = "all";
  std::string prompt_dir = "prompts";
  prompts->add_option("--models", prompt_models, "all or comma-separated model ids");
  prompts->add_option("--out", prompt_dir, "Output directory");

  auto* fetch = app.add_subcommand("fetch-gsv", "Download Google Street View images into the cache");
  psci::FetchGsvOptions fetch_opts;
  std::string gsv_key;
  fetch->add_option("--manifest", fetch_opts.manifest, "Dataset manifest")->required();
  fetch->add_option("--out", fetch_opts.out_dir, "Cache directory")->required();
  fetch->add_option("--key", gsv_key, "API key (defaults to GSV_API_KEY)");
  fetch->add_option("--parallelism", fetch_opts.parallelism, "Concurrent downloads");

  auto* assess = app.add_subcommand("assess", "Rate every image with the selected prompt configurations");
  psci::AssessOptions assess_opts;
  std::optional<int> runs, parallelism, parse_retries, max_attempts;
  std::optional<double> temperature, timeout_s;
  std::string base_url, model_name, api_key;
  MockFlags mock;
  assess->add_option("--manifest", assess_opts.manifest, "Dataset manifest")->required();
  assess->add_option("--store", assess_opts.store, "Run store (JSON Lines)")->required();
  assess->add_option("--models", assess_opts.models, "all or comma-separated model ids");
  assess->add_option("--runs", runs, "Runs per image and model");
  assess->add_option("--parallelism", parallelism, "Concurrent requests");
  assess->add_option("--parse-retries", parse_retries, "Corrective follow-ups on unparseable replies");
  assess->add_flag("--fresh", assess_opts.fresh, "Discard the existing store first");
  assess->add_flag("--yes,-y", assess_opts.assume_yes, "Do not ask before discarding");
  assess->add_option("--base-url", base_url, "Chat completions base URL (PSCI_LLM_BASE_URL)");
  assess->add_option("--model", model_name, "Provider model name (PSCI_LLM_MODEL)");
  assess->add_option("--api-key", api_key, "API key (PSCI_LLM_API_KEY)");
  assess->add_option("--temperature", temperature, "Sampling temperature");
  assess->add_option("--timeout", timeout_s, "Request timeout in seconds");
  assess->add_option("--max-attempts", max_attempts, "Attempts per request");
  assess->add_option("--mock", mock.mode, "echo-truth | fixed | offset | noisy | malformed-then-valid");
  assess->add_option("--mock-value", mock.fixed_value, "Reply for --mock fixed");
  assess->add_option("--mock-delta", mock.delta, "Offset for --mock offset");
  assess->add_option("--mock-sigma", mock.sigma, "Noise sd for --mock noisy");
  assess->add_option("--mock-bad", mock.n_bad, "Malformed replies before a valid one");
  assess->add_option("--seed", mock.seed, "Seed for --mock noisy");

  auto* collect = app.add_subcommand("collect-ratings", "Enter human ratings image by image");
  psci::CollectOptions collect_opts;
  std::string kind = "expert";
  collect->add_option("--manifest", collect_opts.manifest, "Dataset manifest")->required();
  collect->add_option("--ratings", collect_opts.ratings, "Ratings CSV to append to")->required();
  collect->add_option("--assessor", collect_opts.assessor_id, "Assessor id")->required();
  collect->add_option("--kind", kind, "expert | intermediate | novice");

  auto* evaluate = app.add_subcommand("evaluate", "Compare stored ratings against the reference");
  psci::EvaluateOptions eval_opts;
  std::string reference;
  std::string ratings_path;
  std::optional<double> threshold;
  bool zscore = false;
  std::string generated_at;
  evaluate->add_option("--store", eval_opts.store, "Run store")->required();
  evaluate->add_option("--manifest", eval_opts.manifest, "Dataset manifest")->required();
  evaluate->add_option("--ratings", ratings_path, "Human ratings CSV");
  evaluate->add_option("--reference", reference, "ground-truth | consensus")->required();
  evaluate->add_option("--out", eval_opts.out, "Report path");
  evaluate->add_option("--outlier-threshold", threshold, "MAE above which an assessor is flagged");
  evaluate->add_flag("--exclude-outliers", eval_opts.exclude_outliers, "Leave flagged assessors out of pooled results");
  evaluate->add_flag("--zscore", zscore, "Standardize subjects before PCA");
  evaluate->add_option("--provider", eval_opts.provider, "Provider descriptor recorded in the report");
  evaluate->add_option("--generated-at", generated_at, "Fixed report timestamp");

  auto* report = app.add_subcommand("report", "Render a saved evaluation report");
  psci::ReportOptions report_opts;
  report->add_option("--report", report_opts.report, "Report JSON")->required();
  report->add_option("--format", report_opts.format, "text | csv | json");
  std::string report_dir;
  report->add_option("--out", report_dir, "Directory for CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? psci::kExitOk : psci::kExitUsage;
  }

  psci::CommandIo io{std::cin, std::cout, std::cerr, verbose};
  try {
    psci::AppConfig config;
    if (!config_path.empty()) config = psci::load_config(config_path);

    if (*rubric) return psci::cmd_rubric_show(level, io);
    if (*prompts) return psci::cmd_prompts_export(prompt_models, prompt_dir, io);

    if (*fetch) {
      fetch_opts.key = gsv_key.empty() ? env_or_empty("GSV_API_KEY") : gsv_key;
      auto http = psci::make_http_transport();
      return psci::cmd_fetch_gsv(fetch_opts, *http, io);
    }

    if (*assess) {
      assess_opts.n_runs = runs.value_or(config.n_runs);
      assess_opts.parallelism = parallelism.value_or(config.parallelism);
      assess_opts.parse_retry_limit = parse_retries.value_or(config.parse_retry_limit);
      std::signal(SIGINT, on_interrupt);
      if (!mock.mode.empty()) {
        auto provider = build_mock(mock, assess_opts);
        return psci::cmd_assess(assess_opts, provider, io, &g_cancel);
      }
      psci::ProviderConfig provider_config = config.provider;
      if (auto v = env_or_empty("PSCI_LLM_BASE_URL"); !v.empty()) provider_config.base_url = v;
      if (auto v = env_or_empty("PSCI_LLM_MODEL"); !v.empty()) provider_config.model_name = v;
      provider_config.api_key = env_or_empty("PSCI_LLM_API_KEY");
      if (!base_url.empty()) provider_config.base_url = base_url;
      if (!model_name.empty()) provider_config.model_name = model_name;
      if (!api_key.empty()) provider_config.api_key = api_key;
      if (temperature) provider_config.temperature = *temperature;
      if (timeout_s) {
        provider_config.request_timeout = std::chrono::milliseconds(static_cast<long long>(*timeout_s * 1000.0));
      }
      if (max_attempts) provider_config.max_attempts = *max_attempts;
      auto provider = psci::make_http_provider(provider_config, psci::make_http_transport());
      return psci::cmd_assess(assess_opts, provider, io, &g_cancel);
    }

    if (*collect) {
      auto parsed = psci::parse_assessor_kind(kind);
      if (!parsed) throw psci::Error(psci::ErrorKind::usage_error, "unknown --kind " + kind);
      collect_opts.kind = *parsed;
      return psci::cmd_collect_ratings(collect_opts, io);
    }

    if (*evaluate) {
      auto mode = psci::parse_reference_mode(reference);
      if (!mode) throw psci::Error(psci::ErrorKind::usage_error, "--reference must be ground-truth or consensus");
      eval_opts.reference = *mode;
      if (!ratings_path.empty()) eval_opts.ratings = ratings_path;
      eval_opts.outlier_threshold = threshold.value_or(config.outlier_threshold);
      eval_opts.pca_zscore = zscore || config.pca_zscore;
      if (!generated_at.empty()) eval_opts.generated_at = generated_at;
      if (eval_opts.provider.empty() && !config.provider.model_name.empty()) {
        eval_opts.provider = config.provider.model_name + " @ " + config.provider.base_url;
      }
      return psci::cmd_evaluate(eval_opts, io);
    }

    if (*report) {
      if (!report_dir.empty()) report_opts.out_dir = report_dir;
      return psci::cmd_report(report_opts, io);
    }
  } catch (const psci::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return psci::exit_code_for(e.kind());
  }
  return psci::kExitUsage;
}
