#include "psci/image.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include "psci/base64.hpp"
#include "psci/error.hpp"

namespace psci {

std::string_view to_string(ImageSource source) {
  switch (source) {
    case ImageSource::psci_doc: return "psci_doc";
    case ImageSource::literature: return "literature";
    case ImageSource::gsv: return "gsv";
    case ImageSource::other: return "other";
  }
  return "other";
}

std::optional<ImageSource> parse_image_source(std::string_view text) {
  for (auto s : {ImageSource::psci_doc, ImageSource::literature, ImageSource::gsv,
                 ImageSource::other}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

void validate_gsv_query(const GsvQuery& q) {
  auto bad = [](const char* field) { throw Error(ErrorKind::invalid_query, field); };
  if (!std::isfinite(q.latitude) || q.latitude < -90.0 || q.latitude > 90.0) bad("latitude");
  if (!std::isfinite(q.longitude) || q.longitude < -180.0 || q.longitude > 180.0) bad("longitude");
  if (!std::isfinite(q.heading) || q.heading < 0.0 || q.heading >= 360.0) bad("heading");
  if (!std::isfinite(q.pitch) || q.pitch < -90.0 || q.pitch > 90.0) bad("pitch");
  if (!std::isfinite(q.fov) || q.fov <= 10.0 || q.fov > 120.0) bad("fov");
  if (q.width < 1 || q.width > 640) bad("width");
  if (q.height < 1 || q.height > 640) bad("height");
}

std::string_view mime_type(ImageMime mime) {
  return mime == ImageMime::png ? "image/png" : "image/jpeg";
}

std::string EncodedImage::data_url() const {
  return "data:" + std::string(mime_type(mime)) + ";base64," + base64_payload;
}

ImageMime sniff_image(std::span<const std::uint8_t> b) {
  if (b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF) return ImageMime::jpeg;
  if (b.size() >= 8 && b[0] == 0x89 && b[1] == 'P' && b[2] == 'N' && b[3] == 'G' &&
      b[4] == 0x0D && b[5] == 0x0A && b[6] == 0x1A && b[7] == 0x0A) {
    return ImageMime::png;
  }
  throw Error(ErrorKind::not_an_image, "unrecognized image signature");
}

EncodedImage encode_image(std::string image_id, std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorKind::empty_input, "image " + image_id + " is empty");
  EncodedImage out;
  out.mime = sniff_image(bytes);
  out.base64_payload = encode_base64(bytes);
  out.byte_size = bytes.size();
  out.image_id = std::move(image_id);
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::io_error, "cannot read " + path.string());
  return bytes;
}

SizeRange expected_size_range(ImageSource source) {
  if (source == ImageSource::gsv) return {400'000, 800'000};
  return {30'000, 800'000};
}

std::vector<SizeWarning> check_size(const ImageRecord& record) {
  std::vector<SizeWarning> warnings;
  if (!record.byte_size) return warnings;
  const auto range = expected_size_range(record.source);
  const auto size = *record.byte_size;
  if (size < range.min_bytes) {
    warnings.push_back({record.image_id, "undersize: " + std::to_string(size) +
                                             " bytes < " + std::to_string(range.min_bytes)});
  } else if (size > range.max_bytes) {
    warnings.push_back({record.image_id, "oversize: " + std::to_string(size) + " bytes > " +
                                             std::to_string(range.max_bytes)});
  }
  return warnings;
}

}  // namespace psci
