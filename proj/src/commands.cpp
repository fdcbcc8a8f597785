#include "psci/commands.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "psci/gsv.hpp"
#include "psci/manifest.hpp"
#include "psci/ratings_csv.hpp"
#include "psci/rubric.hpp"
#include "psci/run_store.hpp"
#include "psci/runner.hpp"

namespace psci {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage_error:
    case ErrorKind::unknown_format:
      return kExitUsage;
    case ErrorKind::auth_error:
    case ErrorKind::rate_limited:
    case ErrorKind::timeout:
    case ErrorKind::transport_error:
    case ErrorKind::bad_request:
    case ErrorKind::quota_exceeded:
    case ErrorKind::http_error:
      return kExitProvider;
    default:
      return kExitData;
  }
}

namespace {

template <typename F>
int guarded(CommandIo& io, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    io.err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorKind::schema_error, "config " + what);
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) bad_config(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      bad_config(where + key + ": unknown key");
    }
  }
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

AppConfig parse_config(const json& doc) {
  check_keys(doc, {"provider", "n_runs", "parallelism", "parse_retries", "outlier_threshold", "pca_zscore"}, "");
  AppConfig config;
  try {
    if (doc.contains("provider")) {
      const auto& p = doc.at("provider");
      check_keys(p, {"base_url", "model", "temperature", "timeout_s", "max_attempts", "backoff_base_s"},
                 "provider.");
      if (p.contains("base_url")) config.provider.base_url = p.at("base_url").get<std::string>();
      if (p.contains("model")) config.provider.model_name = p.at("model").get<std::string>();
      if (p.contains("temperature")) config.provider.temperature = p.at("temperature").get<double>();
      if (p.contains("timeout_s")) {
        config.provider.request_timeout =
            std::chrono::milliseconds(static_cast<long long>(p.at("timeout_s").get<double>() * 1000.0));
      }
      if (p.contains("max_attempts")) config.provider.max_attempts = p.at("max_attempts").get<int>();
      if (p.contains("backoff_base_s")) {
        config.provider.backoff_base = std::chrono::duration<double>(p.at("backoff_base_s").get<double>());
      }
    }
    if (doc.contains("n_runs")) config.n_runs = doc.at("n_runs").get<int>();
    if (doc.contains("parallelism")) config.parallelism = doc.at("parallelism").get<int>();
    if (doc.contains("parse_retries")) config.parse_retry_limit = doc.at("parse_retries").get<int>();
    if (doc.contains("outlier_threshold")) config.outlier_threshold = doc.at("outlier_threshold").get<double>();
    if (doc.contains("pca_zscore")) config.pca_zscore = doc.at("pca_zscore").get<bool>();
  } catch (const json::exception& e) {
    bad_config(std::string(": ") + e.what());
  }
  return config;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot read config " + path.string());
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    bad_config(std::string(": ") + e.what());
  }
}

std::vector<ModelConfig> select_models(const std::string& spec) {
  if (spec == "all") return builtin_model_configs();
  std::vector<ModelConfig> out;
  std::stringstream ss(spec);
  std::string id;
  while (std::getline(ss, id, ',')) {
    id = trim(id);
    if (id.empty()) continue;
    const auto& config = builtin_model_config(id);
    if (std::find(out.begin(), out.end(), config) == out.end()) out.push_back(config);
  }
  if (out.empty()) throw Error(ErrorKind::usage_error, "no models selected");
  return out;
}

int cmd_rubric_show(std::optional<int> level, CommandIo& io) {
  return guarded(io, [&] {
    if (level && (*level < kMinRating || *level > kMaxRating)) {
      throw Error(ErrorKind::usage_error, "--level must be between 1 and 10");
    }
    io.out << format_rubric(builtin_psci_rubric(), level);
    return kExitOk;
  });
}

int cmd_prompts_export(const std::string& models, const std::filesystem::path& out_dir, CommandIo& io) {
  return guarded(io, [&] {
    auto configs = select_models(models);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::io_error, "cannot create " + out_dir.string());
    for (const auto& config : configs) {
      auto bundle = render_prompt(config, builtin_psci_rubric());
      auto checks = assert_structure(bundle, config);
      for (const auto& c : checks) {
        if (!c.passed) throw Error(ErrorKind::schema_error, config.model_id + " " + c.name + ": " + c.detail);
      }
      auto path = out_dir / prompt_file_name(config);
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << format_prompt_file(bundle);
      if (!out.flush()) throw Error(ErrorKind::io_error, "cannot write " + path.string());
      io.out << path.string() << '\n';
    }
    return kExitOk;
  });
}

std::filesystem::path fetched_manifest_path(const std::filesystem::path& manifest) {
  auto name = manifest.stem().string() + ".fetched.json";
  return manifest.parent_path() / name;
}

int cmd_fetch_gsv(const FetchGsvOptions& options, HttpTransport& http, CommandIo& io) {
  return guarded(io, [&] {
    if (options.key.empty()) throw Error(ErrorKind::usage_error, "no GSV key (set GSV_API_KEY or --key)");
    if (options.parallelism < 1) throw Error(ErrorKind::usage_error, "--parallelism must be >= 1");
    DatasetManifest manifest = load_manifest(options.manifest);
    GsvCache cache(options.out_dir);

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < manifest.images.size(); ++i) {
      if (manifest.images[i].gsv) pending.push_back(i);
    }
    struct Slot {
      std::optional<GsvFetchOutcome> outcome;
      std::string error;
      ErrorKind kind = ErrorKind::http_error;
    };
    std::vector<Slot> slots(pending.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t j = next++; j < pending.size(); j = next++) {
        const auto& record = manifest.images[pending[j]];
        try {
          slots[j].outcome = fetch_gsv_cached(*record.gsv, options.key, http, cache);
        } catch (const Error& e) {
          slots[j].error = redact(e.what(), options.key);
          slots[j].kind = e.kind();
        }
      }
    };
    {
      std::vector<std::jthread> workers;
      auto n = std::min<std::size_t>(static_cast<std::size_t>(options.parallelism), pending.size());
      for (std::size_t t = 0; t < n; ++t) workers.emplace_back(worker);
    }

    std::size_t fetched = 0;
    std::size_t hits = 0;
    int exit_code = kExitOk;
    const auto base = std::filesystem::absolute(manifest.base_dir).lexically_normal();
    for (std::size_t j = 0; j < pending.size(); ++j) {
      auto& record = manifest.images[pending[j]];
      if (!slots[j].outcome) {
        io.err << "unfetched " << record.image_id << ": " << slots[j].error << '\n';
        exit_code = std::max(exit_code, exit_code_for(slots[j].kind));
        continue;
      }
      const auto& outcome = *slots[j].outcome;
      ++fetched;
      if (outcome.cache_hit) ++hits;
      auto absolute = std::filesystem::absolute(outcome.cached_path).lexically_normal();
      record.path = absolute.lexically_relative(base);
      record.byte_size = outcome.bytes.size();
      for (const auto& w : check_size(record)) io.err << "warning: " << w.image_id << ": " << w.message << '\n';
    }
    // Anything unfetched keeps the command from succeeding even when the
    // failure kind alone would map to a data error.
    if (fetched < pending.size() && exit_code == kExitOk) exit_code = kExitData;

    auto out_path = fetched_manifest_path(options.manifest);
    save_manifest(manifest, out_path);
    io.out << "fetched " << fetched << "/" << pending.size() << " (" << hits << " from cache); manifest "
           << out_path.string() << '\n';
    return exit_code;
  });
}

namespace {

bool provider_failure(const std::string& failure) {
  for (auto kind : {ErrorKind::auth_error, ErrorKind::rate_limited, ErrorKind::timeout,
                    ErrorKind::transport_error, ErrorKind::bad_request}) {
    auto prefix = std::string(to_string(kind)) + ":";
    if (failure.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

bool confirm(CommandIo& io, const std::string& question) {
  io.out << question << " [y/N] " << std::flush;
  std::string answer;
  if (!std::getline(io.in, answer)) return false;
  answer = trim(answer);
  return answer == "y" || answer == "Y" || answer == "yes";
}

}  // namespace

int cmd_assess(const AssessOptions& options, const LlmProvider& provider, CommandIo& io,
               const std::atomic<bool>* cancel) {
  return guarded(io, [&] {
    RunSpec spec;
    spec.dataset = load_manifest(options.manifest);
    spec.configs = select_models(options.models);
    spec.n_runs = options.n_runs;
    spec.parallelism = options.parallelism;
    spec.parse_retry_limit = options.parse_retry_limit;
    try {
      validate_run_spec(spec);
    } catch (const Error& e) {
      throw Error(ErrorKind::usage_error, e.detail());
    }

    if (options.fresh && std::filesystem::exists(options.store)) {
      auto existing = RunStore::read_all(options.store).size();
      if (!options.assume_yes &&
          !confirm(io, "Discard " + std::to_string(existing) + " records in " + options.store.string() + "?")) {
        throw Error(ErrorKind::usage_error, "--fresh not confirmed; store left unchanged");
      }
      std::error_code ec;
      std::filesystem::remove(options.store, ec);
      if (ec) throw Error(ErrorKind::store_io_error, "cannot remove " + options.store.string());
    }

    RunStore store(options.store);
    std::atomic<bool> provider_failed{false};
    RunControl control;
    control.cancel = cancel;
    std::mutex log_mutex;
    control.on_record = [&](const AssessmentRecord& r) {
      if (!r.rating && provider_failure(r.failure)) provider_failed = true;
      if (io.verbose) {
        std::lock_guard lock(log_mutex);
        io.err << r.model_id << " r" << r.run_index << " " << r.image_id << ": "
               << (r.rating ? std::to_string(r.rating->value()) : r.failure) << '\n';
      }
    };
    auto summary = execute_run(spec, provider, store, control);

    io.out << "provider: " << provider.descriptor() << '\n';
    io.out << "model      succeeded  failed  skipped\n";
    for (const auto& m : summary.per_model) {
      char line[96];
      std::snprintf(line, sizeof line, "%-10s %9zu  %6zu  %7zu\n", m.model_id.c_str(), m.succeeded, m.failed,
                    m.skipped);
      io.out << line;
    }
    io.out << "new records: " << summary.new_records << ", provider calls: " << summary.provider_calls << '\n';
    if (summary.cancelled) {
      io.out << "cancelled; rerun the same command to resume\n";
      return kExitData;
    }
    return provider_failed ? kExitProvider : kExitOk;
  });
}

int cmd_collect_ratings(const CollectOptions& options, CommandIo& io) {
  return guarded(io, [&] {
    if (options.assessor_id.empty()) throw Error(ErrorKind::usage_error, "--assessor is required");
    if (!is_human(options.kind)) throw Error(ErrorKind::usage_error, "--kind must be a human kind");
    const DatasetManifest manifest = load_manifest(options.manifest);
    std::vector<RatingRow> rows;
    if (std::filesystem::exists(options.ratings)) rows = read_ratings_csv(options.ratings);
    for (const auto& row : rows) {
      if (row.assessor_id == options.assessor_id && row.kind != options.kind) {
        throw Error(ErrorKind::schema_error,
                    "assessor " + options.assessor_id + " already recorded as " + std::string(to_string(row.kind)));
      }
    }

    std::size_t saved = 0;
    const std::size_t total = manifest.images.size();
    for (std::size_t i = 0; i < total; ++i) {
      const auto& image = manifest.images[i];
      io.out << "[" << (i + 1) << "/" << total << "] " << image.image_id;
      if (image.path) io.out << "  " << manifest.resolve(*image.path).string();
      io.out << '\n';

      std::optional<Rating> rating;
      bool quit = false;
      while (true) {
        io.out << "PSCI rating 1-10 (blank skips, q quits): " << std::flush;
        std::string line;
        if (!std::getline(io.in, line)) {
          quit = true;
          break;
        }
        line = trim(line);
        if (line.empty()) break;
        if (line == "q" || line == "Q") {
          quit = true;
          break;
        }
        bool digits = line.size() <= 2 && std::all_of(line.begin(), line.end(),
                                                       [](unsigned char c) { return std::isdigit(c); });
        if (digits) {
          int value = std::stoi(line);
          if (value >= kMinRating && value <= kMaxRating) {
            rating = validate_rating(value);
            break;
          }
        }
        io.out << "Invalid entry; enter an integer from 1 to 10.\n";
      }
      if (quit) break;
      if (!rating) continue;

      auto existing = std::find_if(rows.begin(), rows.end(), [&](const RatingRow& r) {
        return r.image_id == image.image_id && r.assessor_id == options.assessor_id;
      });
      RatingRow row{image.image_id, options.assessor_id, options.kind, *rating};
      if (existing != rows.end()) {
        if (existing->rating == *rating) continue;
        if (!confirm(io, "Replace existing rating " + std::to_string(existing->rating.value()) + " with " +
                             std::to_string(rating->value()) + "?")) {
          continue;
        }
        *existing = row;
        write_ratings_csv(options.ratings, rows);
      } else {
        append_rating_row(options.ratings, row);
        rows.push_back(row);
      }
      ++saved;
    }
    io.out << "saved " << saved << " rating(s) to " << options.ratings.string() << '\n';
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateOptions& options, CommandIo& io) {
  return guarded(io, [&] {
    const DatasetManifest manifest = load_manifest(options.manifest);
    const auto records = RunStore::read_all(options.store);
    std::vector<RatingRow> rows;
    std::optional<std::filesystem::path> ratings = options.ratings;
    if (!ratings && manifest.reference_ratings) ratings = manifest.resolve(*manifest.reference_ratings);
    if (ratings) rows = read_ratings_csv(*ratings);

    EvaluationOptions eval;
    eval.reference = options.reference;
    eval.outlier_threshold = options.outlier_threshold;
    eval.exclude_outliers = options.exclude_outliers;
    eval.pca_zscore = options.pca_zscore;
    eval.provider = options.provider;
    eval.generated_at = options.generated_at;
    auto report = evaluate(manifest, records, rows, eval);
    save_report(report, options.out);

    io.out << "reference: " << to_string(report.reference.mode);
    if (!report.reference.combination.empty()) {
      io.out << " (";
      for (std::size_t i = 0; i < report.reference.combination.size(); ++i) {
        io.out << (i ? ", " : "") << report.reference.combination[i];
      }
      io.out << ")";
    }
    io.out << "\n" << render_summary_table(report);
    for (const auto& id : report.outliers) io.out << "outlier: " << id << '\n';
    for (const auto& w : report.warnings) io.err << "warning: " << w << '\n';
    io.out << "report written to " << options.out.string() << '\n';
    return kExitOk;
  });
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.flush()) throw Error(ErrorKind::io_error, "cannot write " + path.string());
}

std::string render_text(const EvaluationReport& report) {
  std::ostringstream out;
  out << "dataset: " << report.dataset_id << '\n';
  out << "reference: " << to_string(report.reference.mode) << " over " << report.reference.n_subjects
      << " images\n";
  out << "prompt version: " << report.prompt_version << '\n';
  if (!report.provider.empty()) out << "provider: " << report.provider << '\n';
  out << '\n' << render_summary_table(report);
  if (!report.icc.singles.empty()) {
    out << "\nICC over " << report.icc.experts.size() << " experts\n";
    for (const auto& r : report.icc.singles) {
      char line[96];
      std::snprintf(line, sizeof line, "  %s  single %.6f  mean %.6f\n", std::string(to_string(r.variant)).c_str(),
                    r.single, r.mean_raters);
      out << line;
    }
  } else if (!report.icc.error.empty()) {
    out << "\nICC: " << report.icc.error << '\n';
  }
  if (report.pca.projection) {
    char line[96];
    std::snprintf(line, sizeof line, "\nPCA explained variance: %.4f, %.4f\n",
                  report.pca.projection->explained_variance[0], report.pca.projection->explained_variance[1]);
    out << line;
  }
  out << "\noutliers (MAE > " << report.outlier_threshold << "):";
  if (report.outliers.empty()) out << " none";
  for (const auto& id : report.outliers) out << ' ' << id;
  out << '\n';
  return out.str();
}

}  // namespace

int cmd_report(const ReportOptions& options, CommandIo& io) {
  return guarded(io, [&] {
    if (options.format != "text" && options.format != "csv" && options.format != "json") {
      throw Error(ErrorKind::unknown_format, options.format);
    }
    const auto report = load_report(options.report);
    if (options.format == "json") {
      io.out << report_to_json(report).dump(2) << '\n';
    } else if (options.format == "text") {
      io.out << render_text(report);
    } else {
      auto dir = options.out_dir.value_or(options.report.parent_path());
      if (dir.empty()) dir = ".";
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      const std::pair<const char*, std::string> files[] = {
          {"mae_box.csv", render_mae_box_csv(report)},
          {"pca_coords.csv", render_pca_coords_csv(report)},
          {"distribution.csv", render_distribution_csv(report)},
          {"level_diff.csv", render_level_diff_csv(report)},
      };
      for (const auto& [name, text] : files) {
        write_text(dir / name, text);
        io.out << (dir / name).string() << '\n';
      }
      io.out << render_summary_table(report);
    }
    return kExitOk;
  });
}

}  // namespace psci
