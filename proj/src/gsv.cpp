#include "psci/gsv.hpp"

#include <unistd.h>

#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <thread>

#include "psci/error.hpp"

namespace psci {

namespace {

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string canonical_parameters(const GsvQuery& q) {
  return "size=" + std::to_string(q.width) + "x" + std::to_string(q.height) +
         "&location=" + format_number(q.latitude) + "," + format_number(q.longitude) +
         "&heading=" + format_number(q.heading) + "&pitch=" + format_number(q.pitch) +
         "&fov=" + format_number(q.fov);
}

bool is_image_content_type(const std::string& content_type) {
  return content_type.rfind("image/", 0) == 0;
}

}  // namespace

std::string build_gsv_url(const GsvQuery& query, std::string_view key) {
  validate_gsv_query(query);
  if (key.empty()) throw Error(ErrorKind::invalid_query, "key");
  return std::string(kGsvEndpoint) + "?" + canonical_parameters(query) + "&key=" + url_encode(key);
}

std::string gsv_query_digest(const GsvQuery& query) {
  // FNV-1a, 64 bit.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_parameters(query)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<std::uint8_t> fetch_gsv_image(const GsvQuery& query, std::string_view key,
                                          HttpTransport& http) {
  const auto url = build_gsv_url(query, key);
  const auto response = http.get(url, {}, std::chrono::seconds(60));
  if (response.status == 403 || response.status == 429) {
    throw Error(ErrorKind::quota_exceeded, "HTTP " + std::to_string(response.status));
  }
  if (response.status != 200) {
    throw Error(ErrorKind::http_error, "HTTP " + std::to_string(response.status));
  }
  if (!is_image_content_type(response.content_type)) {
    throw Error(ErrorKind::not_an_image, "content type '" + response.content_type + "'");
  }
  return {response.body.begin(), response.body.end()};
}

GsvCache::GsvCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path GsvCache::path_for(const GsvQuery& query) const {
  return root_ / "gsv" / (gsv_query_digest(query) + ".jpg");
}

std::optional<std::vector<std::uint8_t>> GsvCache::load(const GsvQuery& query) const {
  const auto path = path_for(query);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  auto bytes = read_file_bytes(path);
  if (bytes.empty()) return std::nullopt;
  return bytes;
}

std::filesystem::path GsvCache::store(const GsvQuery& query,
                                      const std::vector<std::uint8_t>& bytes) const {
  static std::atomic<std::uint64_t> counter{0};
  const auto path = path_for(query);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot create " + path.parent_path().string());

  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) +
         "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::io_error, "cannot move cache file into " + path.string());
  }
  return path;
}

GsvFetchOutcome fetch_gsv_cached(const GsvQuery& query, std::string_view key, HttpTransport& http,
                                 const GsvCache& cache) {
  if (auto bytes = cache.load(query)) {
    return {std::move(*bytes), cache.path_for(query), true};
  }
  auto bytes = fetch_gsv_image(query, key, http);
  auto path = cache.store(query, bytes);
  return {std::move(bytes), std::move(path), false};
}

}  // namespace psci
