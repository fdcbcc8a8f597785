#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psci/rating.hpp"

namespace psci {

enum class ImageSource { psci_doc, literature, gsv, other };

std::string_view to_string(ImageSource source);
std::optional<ImageSource> parse_image_source(std::string_view text);

// Street View Static API camera request. Defaults frame the roadway ahead.
struct GsvQuery {
  double latitude = 0.0;
  double longitude = 0.0;
  double heading = 0.0;
  double pitch = 0.0;
  double fov = 90.0;
  int width = 640;
  int height = 640;

  bool operator==(const GsvQuery&) const = default;
};

// Throws Error(invalid_query) naming the first offending field.
void validate_gsv_query(const GsvQuery& query);

struct GpsPoint {
  double latitude = 0.0;
  double longitude = 0.0;
  bool operator==(const GpsPoint&) const = default;
};

struct ImageRecord {
  std::string image_id;
  ImageSource source = ImageSource::other;
  // Relative to the manifest directory. For gsv records this is filled in
  // once the image has been fetched into the cache.
  std::optional<std::filesystem::path> path;
  std::optional<GsvQuery> gsv;
  std::optional<std::uint64_t> byte_size;
  std::optional<GpsPoint> gps;
  std::optional<Rating> ground_truth;

  bool operator==(const ImageRecord&) const = default;
};

enum class ImageMime { jpeg, png };

std::string_view mime_type(ImageMime mime);

struct EncodedImage {
  std::string image_id;
  ImageMime mime = ImageMime::jpeg;
  std::string base64_payload;
  std::uint64_t byte_size = 0;

  // "data:image/jpeg;base64,<payload>"
  std::string data_url() const;
};

// Detects JPEG/PNG from magic bytes; anything else is Error(not_an_image).
ImageMime sniff_image(std::span<const std::uint8_t> bytes);

EncodedImage encode_image(std::string image_id, std::span<const std::uint8_t> bytes);

// Throws Error(io_error) when the file is missing or unreadable.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

struct SizeRange {
  std::uint64_t min_bytes;
  std::uint64_t max_bytes;
};

// 1 KB = 1000 bytes. Street View frames: 400-800 KB, everything else 30-800 KB.
SizeRange expected_size_range(ImageSource source);

struct SizeWarning {
  std::string image_id;
  std::string message;
};

// Never throws; an unknown byte_size yields no warnings.
std::vector<SizeWarning> check_size(const ImageRecord& record);

}  // namespace psci
