#include "psci/ratings_csv.hpp"

#include <charconv>
#include <fstream>

#include "psci/error.hpp"

namespace psci {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<RatingRow> parse_ratings_csv(std::istream& in) {
  std::vector<RatingRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto where = "line " + std::to_string(line_no);
    if (!header_seen) {
      if (line != kRatingsHeader) {
        throw Error(ErrorKind::schema_error, where + ": expected header " + kRatingsHeader);
      }
      header_seen = true;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 4) throw Error(ErrorKind::schema_error, where + ": expected 4 fields");
    auto kind = parse_assessor_kind(fields[2]);
    if (!kind || *kind == AssessorKind::model_run || *kind == AssessorKind::consensus) {
      throw Error(ErrorKind::schema_error, where + ": bad assessor_kind '" + fields[2] + "'");
    }
    int value = 0;
    const auto& text = fields[3];
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorKind::schema_error, where + ": rating is not an integer");
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorKind::schema_error, where + ": empty image_id or assessor_id");
    }
    try {
      rows.push_back({fields[0], fields[1], *kind, validate_rating(value)});
    } catch (const Error&) {
      throw Error(ErrorKind::schema_error, where + ": rating outside 1-10");
    }
  }
  if (!header_seen) throw Error(ErrorKind::schema_error, "missing header");
  return rows;
}

std::vector<RatingRow> read_ratings_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open ratings " + path.string());
  return parse_ratings_csv(in);
}

namespace {

void write_row(std::ostream& out, const RatingRow& row) {
  out << csv_escape(row.image_id) << ',' << csv_escape(row.assessor_id) << ','
      << to_string(row.kind) << ',' << row.rating.value() << '\n';
}

}  // namespace

void write_ratings_csv(std::ostream& out, const std::vector<RatingRow>& rows) {
  out << kRatingsHeader << '\n';
  for (const auto& row : rows) write_row(out, row);
}

void write_ratings_csv(const std::filesystem::path& path, const std::vector<RatingRow>& rows) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
    write_ratings_csv(out, rows);
    out.flush();
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot replace " + path.string());
}

void append_rating_row(const std::filesystem::path& path, const RatingRow& row) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorKind::io_error, "cannot append to " + path.string());
  if (fresh) out << kRatingsHeader << '\n';
  write_row(out, row);
  out.flush();
  if (!out) throw Error(ErrorKind::io_error, "cannot append to " + path.string());
}

}  // namespace psci
