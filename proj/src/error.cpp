#include "psci/error.hpp"

namespace psci {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::empty_result: return "empty_result";
    case ErrorKind::unknown_assessor: return "unknown_assessor";
    case ErrorKind::io_error: return "io_error";
    case ErrorKind::schema_error: return "schema_error";
    case ErrorKind::duplicate_image_id: return "duplicate_image_id";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::invalid_query: return "invalid_query";
    case ErrorKind::http_error: return "http_error";
    case ErrorKind::not_an_image: return "not_an_image";
    case ErrorKind::transport_error: return "transport_error";
    case ErrorKind::quota_exceeded: return "quota_exceeded";
    case ErrorKind::auth_error: return "auth_error";
    case ErrorKind::rate_limited: return "rate_limited";
    case ErrorKind::timeout: return "timeout";
    case ErrorKind::bad_request: return "bad_request";
    case ErrorKind::missing_truth: return "missing_truth";
    case ErrorKind::no_rating_found: return "no_rating_found";
    case ErrorKind::store_io_error: return "store_io_error";
    case ErrorKind::duplicate_record: return "duplicate_record";
    case ErrorKind::unknown_image: return "unknown_image";
    case ErrorKind::conflicting_rating: return "conflicting_rating";
    case ErrorKind::zero_variance: return "zero_variance";
    case ErrorKind::degenerate_matrix: return "degenerate_matrix";
    case ErrorKind::pole: return "pole";
    case ErrorKind::no_valid_combination: return "no_valid_combination";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::missing_reference: return "missing_reference";
    case ErrorKind::usage_error: return "usage_error";
    case ErrorKind::unknown_format: return "unknown_format";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

}  // namespace psci
