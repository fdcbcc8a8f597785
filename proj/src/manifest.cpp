#include "psci/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include "psci/error.hpp"

namespace psci {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& field, const std::string& reason) {
  throw Error(ErrorKind::schema_error, field + ": " + reason);
}

double number_field(const json& obj, const char* key, const std::string& where,
                    std::optional<double> fallback = {}) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    schema(where + "." + key, "missing");
  }
  if (!it->is_number()) schema(where + "." + key, "expected a number");
  return it->get<double>();
}

int int_field(const json& obj, const char* key, const std::string& where, int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) schema(where + "." + key, "expected an integer");
  return it->get<int>();
}

std::filesystem::path relative_path(const json& value, const std::string& where) {
  if (!value.is_string() || value.get<std::string>().empty()) {
    schema(where, "expected a non-empty path string");
  }
  std::filesystem::path p = value.get<std::string>();
  if (p.is_absolute()) schema(where, "must be relative to the manifest directory");
  return p;
}

GsvQuery parse_gsv(const json& obj, const std::string& where) {
  if (!obj.is_object()) schema(where, "expected an object");
  GsvQuery q;
  q.latitude = number_field(obj, "lat", where);
  q.longitude = number_field(obj, "lon", where);
  q.heading = number_field(obj, "heading", where, q.heading);
  q.pitch = number_field(obj, "pitch", where, q.pitch);
  q.fov = number_field(obj, "fov", where, q.fov);
  q.width = int_field(obj, "width", where, q.width);
  q.height = int_field(obj, "height", where, q.height);
  try {
    validate_gsv_query(q);
  } catch (const Error& e) {
    schema(where + "." + e.detail(), "out of range");
  }
  return q;
}

ImageRecord parse_image(const json& obj, const std::string& where) {
  if (!obj.is_object()) schema(where, "expected an object");
  ImageRecord r;
  auto id = obj.find("image_id");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
    schema(where + ".image_id", "expected a non-empty string");
  }
  r.image_id = id->get<std::string>();

  auto src = obj.find("source");
  if (src == obj.end() || !src->is_string()) schema(where + ".source", "expected a string");
  auto source = parse_image_source(src->get<std::string>());
  if (!source) schema(where + ".source", "unknown source '" + src->get<std::string>() + "'");
  r.source = *source;

  if (auto p = obj.find("path"); p != obj.end()) r.path = relative_path(*p, where + ".path");
  if (auto g = obj.find("gsv"); g != obj.end()) r.gsv = parse_gsv(*g, where + ".gsv");
  if (r.source == ImageSource::gsv && !r.gsv) schema(where + ".gsv", "required for gsv source");
  if (r.source != ImageSource::gsv && !r.path) schema(where + ".path", "required for local source");

  if (auto b = obj.find("byte_size"); b != obj.end()) {
    if (!b->is_number_unsigned()) schema(where + ".byte_size", "expected a non-negative integer");
    r.byte_size = b->get<std::uint64_t>();
  }
  if (auto g = obj.find("gps"); g != obj.end()) {
    GpsPoint gps{number_field(*g, "lat", where + ".gps"), number_field(*g, "lon", where + ".gps")};
    if (gps.latitude < -90 || gps.latitude > 90) schema(where + ".gps.lat", "out of range");
    if (gps.longitude < -180 || gps.longitude > 180) schema(where + ".gps.lon", "out of range");
    r.gps = gps;
  }
  if (auto t = obj.find("ground_truth"); t != obj.end() && !t->is_null()) {
    if (!t->is_number_integer()) schema(where + ".ground_truth", "expected an integer");
    try {
      r.ground_truth = validate_rating(t->get<int>());
    } catch (const Error&) {
      schema(where + ".ground_truth", "outside 1-10");
    }
  }
  return r;
}

}  // namespace

const ImageRecord* DatasetManifest::find(const std::string& image_id) const {
  for (const auto& r : images) {
    if (r.image_id == image_id) return &r;
  }
  return nullptr;
}

std::filesystem::path DatasetManifest::resolve(const std::filesystem::path& relative) const {
  return base_dir / relative;
}

DatasetManifest parse_manifest(const json& doc, std::filesystem::path base_dir) {
  if (!doc.is_object()) schema("<root>", "expected an object");
  DatasetManifest m;
  m.base_dir = std::move(base_dir);
  auto id = doc.find("dataset_id");
  if (id == doc.end() || !id->is_string()) schema("dataset_id", "expected a string");
  m.dataset_id = id->get<std::string>();

  auto images = doc.find("images");
  if (images == doc.end() || !images->is_array()) schema("images", "expected an array");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < images->size(); ++i) {
    auto record = parse_image((*images)[i], "images[" + std::to_string(i) + "]");
    if (!seen.insert(record.image_id).second) {
      throw Error(ErrorKind::duplicate_image_id, record.image_id);
    }
    m.images.push_back(std::move(record));
  }
  if (auto ref = doc.find("reference_ratings"); ref != doc.end() && !ref->is_null()) {
    m.reference_ratings = relative_path(*ref, "reference_ratings");
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema_error, std::string("<root>: ") + e.what());
  }
  return parse_manifest(doc, path.parent_path());
}

json manifest_to_json(const DatasetManifest& m) {
  json images = json::array();
  for (const auto& r : m.images) {
    json obj = {{"image_id", r.image_id}, {"source", std::string(to_string(r.source))}};
    if (r.path) obj["path"] = r.path->generic_string();
    if (r.gsv) {
      obj["gsv"] = {{"lat", r.gsv->latitude},   {"lon", r.gsv->longitude},
                    {"heading", r.gsv->heading}, {"pitch", r.gsv->pitch},
                    {"fov", r.gsv->fov},         {"width", r.gsv->width},
                    {"height", r.gsv->height}};
    }
    if (r.byte_size) obj["byte_size"] = *r.byte_size;
    if (r.gps) obj["gps"] = {{"lat", r.gps->latitude}, {"lon", r.gps->longitude}};
    if (r.ground_truth) obj["ground_truth"] = r.ground_truth->value();
    images.push_back(std::move(obj));
  }
  json doc = {{"dataset_id", m.dataset_id}, {"images", std::move(images)}};
  if (m.reference_ratings) doc["reference_ratings"] = m.reference_ratings->generic_string();
  return doc;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write manifest " + path.string());
  out << manifest_to_json(manifest).dump(2) << "\n";
  if (!out) throw Error(ErrorKind::io_error, "cannot write manifest " + path.string());
}

EncodedImage read_encoded_image(const DatasetManifest& manifest, const ImageRecord& record) {
  if (!record.path) {
    throw Error(ErrorKind::io_error, "image " + record.image_id + " has not been fetched yet");
  }
  auto bytes = read_file_bytes(manifest.resolve(*record.path));
  return encode_image(record.image_id, bytes);
}

}  // namespace psci
