#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "psci/rating.hpp"

namespace psci {

struct AssessmentRecord {
  std::string image_id;
  std::string model_id;
  int run_index = 0;
  std::string prompt_version;
  std::string raw_text;
  std::optional<Rating> rating;
  std::string failure;  // empty iff rating is present
  int attempts_used = 0;
  double latency_s = 0.0;
  std::string timestamp;  // UTC, ISO 8601

  bool operator==(const AssessmentRecord&) const = default;
};

nlohmann::json record_to_json(const AssessmentRecord& record);
// Throws Error(store_io_error) on a malformed object.
AssessmentRecord record_from_json(const nlohmann::json& doc);

std::string utc_timestamp_now();

// Append-only JSON Lines file, one record per line, unique on
// (image_id, model_id, run_index). Appends are serialized internally and
// flushed line by line. A torn final line left by a crash is dropped on
// open.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path path);

  RunStore(const RunStore&) = delete;
  RunStore& operator=(const RunStore&) = delete;

  // Throws duplicate_record or store_io_error.
  void append(const AssessmentRecord& record);
  bool contains(const std::string& image_id, const std::string& model_id, int run_index) const;
  std::vector<AssessmentRecord> records() const;
  std::size_t size() const;
  const std::filesystem::path& path() const noexcept { return path_; }

  static std::vector<AssessmentRecord> read_all(const std::filesystem::path& path);

 private:
  using Key = std::tuple<std::string, std::string, int>;

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::vector<AssessmentRecord> records_;
  std::set<Key> keys_;
  std::ofstream out_;
};

}  // namespace psci
