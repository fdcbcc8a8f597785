#include "psci/run_store.hpp"

#include <ctime>
#include <sstream>

#include "psci/error.hpp"

namespace psci {

using nlohmann::json;

json record_to_json(const AssessmentRecord& r) {
  json doc = {{"image_id", r.image_id},
              {"model_id", r.model_id},
              {"run_index", r.run_index},
              {"prompt_version", r.prompt_version},
              {"raw_text", r.raw_text},
              {"rating", r.rating ? json(r.rating->value()) : json(nullptr)},
              {"failure", r.failure.empty() ? json(nullptr) : json(r.failure)},
              {"attempts_used", r.attempts_used},
              {"latency_s", r.latency_s},
              {"timestamp", r.timestamp}};
  return doc;
}

AssessmentRecord record_from_json(const json& doc) {
  try {
    AssessmentRecord r;
    r.image_id = doc.at("image_id").get<std::string>();
    r.model_id = doc.at("model_id").get<std::string>();
    r.run_index = doc.at("run_index").get<int>();
    r.prompt_version = doc.at("prompt_version").get<std::string>();
    r.raw_text = doc.at("raw_text").get<std::string>();
    if (const auto& rating = doc.at("rating"); !rating.is_null()) {
      r.rating = validate_rating(rating.get<int>());
    }
    if (const auto& failure = doc.at("failure"); !failure.is_null()) {
      r.failure = failure.get<std::string>();
    }
    r.attempts_used = doc.at("attempts_used").get<int>();
    r.latency_s = doc.at("latency_s").get<double>();
    r.timestamp = doc.at("timestamp").get<std::string>();
    if (r.rating.has_value() == !r.failure.empty()) {
      throw Error(ErrorKind::store_io_error, "record must have exactly one of rating/failure");
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::store_io_error, std::string("malformed record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::store_io_error, "malformed record: " + e.detail());
  }
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

struct LoadResult {
  std::vector<AssessmentRecord> records;
  std::uintmax_t good_bytes = 0;
  bool torn_tail = false;
};

LoadResult load_lines(const std::filesystem::path& path) {
  LoadResult result;
  std::ifstream in(path, std::ios::binary);
  if (!in) return result;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const auto line = content.substr(pos, terminated ? nl - pos : std::string::npos);
    ++line_no;
    if (!line.empty()) {
      try {
        result.records.push_back(record_from_json(json::parse(line)));
      } catch (const std::exception&) {
        if (!terminated) {
          result.torn_tail = true;
          break;
        }
        throw Error(ErrorKind::store_io_error,
                    path.string() + ": malformed line " + std::to_string(line_no));
      }
    }
    if (!terminated) {
      // Valid JSON but missing its newline: keep it and terminate on reopen.
      result.good_bytes = content.size();
      result.torn_tail = true;
      break;
    }
    pos = nl + 1;
    result.good_bytes = pos;
  }
  return result;
}

}  // namespace

std::vector<AssessmentRecord> RunStore::read_all(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::store_io_error, "run store " + path.string() + " does not exist");
  }
  return load_lines(path).records;
}

RunStore::RunStore(std::filesystem::path path) : path_(std::move(path)) {
  auto loaded = load_lines(path_);
  for (auto& r : loaded.records) {
    if (!keys_.emplace(r.image_id, r.model_id, r.run_index).second) {
      throw Error(ErrorKind::store_io_error, "duplicate record in " + path_.string() + " for " +
                                                 r.image_id + "/" + r.model_id + "/" +
                                                 std::to_string(r.run_index));
    }
    records_.push_back(std::move(r));
  }
  std::error_code ec;
  if (loaded.torn_tail) {
    std::filesystem::resize_file(path_, loaded.good_bytes, ec);
    if (ec) throw Error(ErrorKind::store_io_error, "cannot repair " + path_.string());
  }
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw Error(ErrorKind::store_io_error, "cannot open " + path_.string());
  if (loaded.torn_tail && loaded.good_bytes > 0) {
    // The kept tail line was unterminated; finish it.
    std::ifstream check(path_, std::ios::binary);
    check.seekg(-1, std::ios::end);
    char last = 0;
    if (check.get(last) && last != '\n') {
      out_ << '\n';
      out_.flush();
    }
  }
}

void RunStore::append(const AssessmentRecord& record) {
  std::lock_guard lock(mutex_);
  if (!keys_.emplace(record.image_id, record.model_id, record.run_index).second) {
    throw Error(ErrorKind::duplicate_record, record.image_id + "/" + record.model_id + "/" +
                                                 std::to_string(record.run_index));
  }
  out_ << record_to_json(record).dump() << '\n';
  out_.flush();
  if (!out_) {
    keys_.erase({record.image_id, record.model_id, record.run_index});
    throw Error(ErrorKind::store_io_error, "write failed on " + path_.string());
  }
  records_.push_back(record);
}

bool RunStore::contains(const std::string& image_id, const std::string& model_id,
                        int run_index) const {
  std::lock_guard lock(mutex_);
  return keys_.count({image_id, model_id, run_index}) > 0;
}

std::vector<AssessmentRecord> RunStore::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::size_t RunStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace psci
