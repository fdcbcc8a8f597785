#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psci/http_transport.hpp"
#include "psci/image.hpp"

namespace psci {

inline constexpr std::string_view kGsvEndpoint = "https://maps.googleapis.com/maps/api/streetview";

// Parameter order is fixed: size, location, heading, pitch, fov, key.
// Throws Error(invalid_query(field)); the error never contains the key.
std::string build_gsv_url(const GsvQuery& query, std::string_view key);

// Stable 16-hex-digit digest of the camera parameters (not the key).
std::string gsv_query_digest(const GsvQuery& query);

// 200 with an image/* content type returns the body. 403 and 429 map to
// quota_exceeded, any other non-200 to http_error, a non-image body to
// not_an_image. Transport failures propagate as transport_error / timeout.
std::vector<std::uint8_t> fetch_gsv_image(const GsvQuery& query, std::string_view key,
                                          HttpTransport& http);

// On-disk cache at <root>/gsv/<digest>.jpg. Writers go through a unique
// temporary file and an atomic rename, so concurrent fetches of the same
// query are safe.
class GsvCache {
 public:
  explicit GsvCache(std::filesystem::path root);

  std::filesystem::path path_for(const GsvQuery& query) const;
  std::optional<std::vector<std::uint8_t>> load(const GsvQuery& query) const;
  std::filesystem::path store(const GsvQuery& query, const std::vector<std::uint8_t>& bytes) const;

 private:
  std::filesystem::path root_;
};

struct GsvFetchOutcome {
  std::vector<std::uint8_t> bytes;
  std::filesystem::path cached_path;
  bool cache_hit = false;
};

GsvFetchOutcome fetch_gsv_cached(const GsvQuery& query, std::string_view key, HttpTransport& http,
                                 const GsvCache& cache);

}  // namespace psci
