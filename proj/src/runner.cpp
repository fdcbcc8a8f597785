#include "psci/runner.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "psci/error.hpp"

namespace psci {

std::size_t RunSummary::total_failed() const {
  std::size_t n = 0;
  for (const auto& m : per_model) n += m.failed;
  return n;
}

void validate_run_spec(const RunSpec& spec) {
  if (spec.n_runs < 1) throw Error(ErrorKind::usage_error, "n_runs must be >= 1");
  if (spec.parallelism < 1) throw Error(ErrorKind::usage_error, "parallelism must be >= 1");
  if (spec.parse_retry_limit < 0) throw Error(ErrorKind::usage_error, "parse_retry_limit must be >= 0");
  if (spec.configs.empty()) throw Error(ErrorKind::usage_error, "no model configs selected");
  for (const auto& c : spec.configs) validate_intensity(c.intensity);
}

namespace {

struct Triple {
  std::size_t image;
  std::size_t config;
  int run_index;
};

// Reads and encodes each image at most once, on first use.
class ImageLoader {
 public:
  explicit ImageLoader(const DatasetManifest& dataset)
      : dataset_(dataset), slots_(dataset.images.size()) {}

  const EncodedImage& get(std::size_t index) {
    auto& slot = slots_[index];
    std::call_once(slot.once, [&] {
      try {
        slot.image = read_encoded_image(dataset_, dataset_.images[index]);
      } catch (const Error& e) {
        slot.error = e.what();
        slot.kind = e.kind();
      }
    });
    if (!slot.image) throw Error(slot.kind, slot.error);
    return *slot.image;
  }

 private:
  struct Slot {
    std::once_flag once;
    std::optional<EncodedImage> image;
    std::string error;
    ErrorKind kind = ErrorKind::io_error;
  };
  const DatasetManifest& dataset_;
  std::vector<Slot> slots_;
};

AssessmentRecord assess_triple(const RunSpec& spec, const Triple& t, const PromptBundle& bundle,
                               const LlmProvider& provider, ImageLoader& images) {
  const auto& image_record = spec.dataset.images[t.image];
  AssessmentRecord record;
  record.image_id = image_record.image_id;
  record.model_id = spec.configs[t.config].model_id;
  record.run_index = t.run_index;
  record.prompt_version = std::string(kPromptVersion);

  const auto start = std::chrono::steady_clock::now();
  try {
    ChatRequest request = make_chat_request({bundle, images.get(t.image)}, t.run_index);
    for (int corrections = 0;; ++corrections) {
      auto response = provider.complete(request);
      record.attempts_used += response.attempts_used;
      record.raw_text = response.raw_text;
      if (auto rating = try_parse_rating(response.raw_text)) {
        record.rating = rating;
        break;
      }
      if (corrections >= spec.parse_retry_limit) {
        record.failure = "no_rating_found";
        break;
      }
      // Continue the same conversation so the model keeps the image context.
      request.turns.push_back({ChatTurn::Role::assistant, response.raw_text});
      request.turns.push_back({ChatTurn::Role::user, std::string(kCorrectiveFollowUp)});
    }
  } catch (const ProviderError& e) {
    record.attempts_used += e.attempts_used();
    record.failure = e.what();
  } catch (const Error& e) {
    record.failure = e.what();
  }
  record.latency_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  record.timestamp = utc_timestamp_now();
  return record;
}

}  // namespace

RunSummary execute_run(const RunSpec& spec, const LlmProvider& provider, RunStore& store,
                       const RunControl& control) {
  validate_run_spec(spec);
  std::vector<PromptBundle> bundles;
  for (const auto& config : spec.configs) {
    bundles.push_back(render_prompt(config, builtin_psci_rubric()));
  }

  RunSummary summary;
  for (const auto& config : spec.configs) summary.per_model.push_back({config.model_id});

  std::vector<Triple> pending;
  for (std::size_t c = 0; c < spec.configs.size(); ++c) {
    for (std::size_t i = 0; i < spec.dataset.images.size(); ++i) {
      for (int r = 0; r < spec.n_runs; ++r) {
        if (store.contains(spec.dataset.images[i].image_id, spec.configs[c].model_id, r)) {
          ++summary.per_model[c].skipped;
        } else {
          pending.push_back({i, c, r});
        }
      }
    }
  }

  const auto calls_before = provider.calls();
  ImageLoader images(spec.dataset);
  std::mutex summary_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> store_failed{false};
  std::exception_ptr store_error;

  auto worker = [&] {
    while (true) {
      if (store_failed.load()) return;
      if (control.cancel && control.cancel->load()) return;
      const auto idx = next.fetch_add(1);
      if (idx >= pending.size()) return;
      const auto& t = pending[idx];
      auto record = assess_triple(spec, t, bundles[t.config], provider, images);
      try {
        store.append(record);
      } catch (...) {
        std::lock_guard lock(summary_mutex);
        if (!store_error) store_error = std::current_exception();
        store_failed = true;
        return;
      }
      {
        std::lock_guard lock(summary_mutex);
        auto& counts = summary.per_model[t.config];
        (record.rating ? counts.succeeded : counts.failed) += 1;
        ++summary.new_records;
        if (control.on_record) control.on_record(record);
      }
    }
  };

  const auto n_threads =
      static_cast<std::size_t>(std::min<std::size_t>(spec.parallelism, std::max<std::size_t>(pending.size(), 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  }

  if (store_error) std::rethrow_exception(store_error);
  summary.provider_calls = provider.calls() - calls_before;
  summary.cancelled = next.load() < pending.size() && control.cancel && control.cancel->load();
  return summary;
}

RatingMatrix records_to_matrix(const std::vector<AssessmentRecord>& records,
                               const DatasetManifest& dataset) {
  std::vector<std::string> subjects;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& image : dataset.images) {
    row_of.emplace(image.image_id, subjects.size());
    subjects.push_back(image.image_id);
  }

  std::map<std::pair<std::string, int>, std::vector<const AssessmentRecord*>> columns;
  for (const auto& r : records) {
    if (row_of.count(r.image_id)) columns[{r.model_id, r.run_index}].push_back(&r);
  }

  std::vector<AssessorId> assessors;
  for (const auto& [key, _] : columns) assessors.push_back(AssessorId::model_run(key.first, key.second));
  RatingMatrix matrix(subjects, assessors);
  std::size_t j = 0;
  for (const auto& [key, column] : columns) {
    for (const auto* r : column) {
      if (r->rating) matrix.set(row_of.at(r->image_id), j, r->rating);
    }
    ++j;
  }
  return matrix;
}

RatingMatrix merge_human_ratings(const RatingMatrix& matrix, const std::vector<RatingRow>& rows) {
  std::vector<std::string> order;
  std::unordered_map<std::string, AssessorKind> kinds;
  std::unordered_map<std::string, std::vector<Cell>> columns;

  for (const auto& row : rows) {
    const auto subject = matrix.subject_index(row.image_id);
    if (!subject) throw Error(ErrorKind::unknown_image, row.image_id);
    auto [it, inserted] = kinds.emplace(row.assessor_id, row.kind);
    if (inserted) {
      if (matrix.assessor_index(row.assessor_id)) {
        throw Error(ErrorKind::schema_error, "assessor " + row.assessor_id + " already present");
      }
      order.push_back(row.assessor_id);
      columns[row.assessor_id].resize(matrix.n_subjects());
    } else if (it->second != row.kind) {
      throw Error(ErrorKind::schema_error, "assessor " + row.assessor_id + " declared with two kinds");
    }
    auto& cell = columns[row.assessor_id][*subject];
    if (cell && *cell != row.rating) {
      throw Error(ErrorKind::conflicting_rating, row.image_id + "/" + row.assessor_id);
    }
    cell = row.rating;
  }

  RatingMatrix out = matrix;
  for (const auto& id : order) {
    out.append_column(AssessorId::human(id, kinds.at(id)), std::move(columns[id]));
  }
  return out;
}

}  // namespace psci
