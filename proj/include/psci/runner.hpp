#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psci/llm_client.hpp"
#include "psci/manifest.hpp"
#include "psci/prompt.hpp"
#include "psci/rating_matrix.hpp"
#include "psci/ratings_csv.hpp"
#include "psci/run_store.hpp"

namespace psci {

// Splits on non-digit boundaries and keeps integer tokens in [1, 10] that
// are not part of a decimal number ("7.5"); the last such token wins.
// Total over all inputs; throws Error(no_rating_found) when nothing
// qualifies.
Rating parse_rating(std::string_view raw_text);
std::optional<Rating> try_parse_rating(std::string_view raw_text) noexcept;

struct RunSpec {
  DatasetManifest dataset;
  std::vector<ModelConfig> configs;
  int n_runs = 10;
  int parallelism = 1;
  int parse_retry_limit = 2;
  std::optional<std::uint64_t> seed;  // mock providers only
};

void validate_run_spec(const RunSpec& spec);

struct ModelRunCounts {
  std::string model_id;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // already present in the store
};

struct RunSummary {
  std::vector<ModelRunCounts> per_model;
  std::size_t new_records = 0;
  std::uint64_t provider_calls = 0;
  bool cancelled = false;

  std::size_t total_failed() const;
};

struct RunControl {
  // Checked before each triple starts; in-flight triples still finish.
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const AssessmentRecord&)> on_record;
};

// Runs every (image, config, run_index) triple missing from the store and
// appends exactly one record per triple. Provider failures become failed
// records; only store I/O errors abort.
RunSummary execute_run(const RunSpec& spec, const LlmProvider& provider, RunStore& store,
                       const RunControl& control = {});

// One model_run column per (model_id, run_index), rows in manifest order.
// Failed records leave the cell empty.
RatingMatrix records_to_matrix(const std::vector<AssessmentRecord>& records,
                               const DatasetManifest& dataset);

// Appends one column per distinct assessor_id in first-appearance order.
// Errors: unknown_image, conflicting_rating, schema_error when an id clashes
// with an existing column or is declared with two kinds.
RatingMatrix merge_human_ratings(const RatingMatrix& matrix, const std::vector<RatingRow>& rows);

}  // namespace psci
