#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psci/image.hpp"

namespace psci {

struct DatasetManifest {
  std::string dataset_id;
  std::vector<ImageRecord> images;
  // Relative to base_dir, like image paths.
  std::optional<std::filesystem::path> reference_ratings;
  // Directory the manifest was loaded from; not serialized.
  std::filesystem::path base_dir;

  const ImageRecord* find(const std::string& image_id) const;
  std::filesystem::path resolve(const std::filesystem::path& relative) const;

  bool operator==(const DatasetManifest&) const = default;
};

// Validates every field and invariant but reads no image bytes.
// Errors: io_error, schema_error("<field>: <reason>"), duplicate_image_id.
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(const nlohmann::json& doc, std::filesystem::path base_dir);

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Lazy image access: the file is opened here, not at load time.
// gsv records without a cached path raise io_error.
EncodedImage read_encoded_image(const DatasetManifest& manifest, const ImageRecord& record);

}  // namespace psci
