#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psci {

enum class ErrorKind {
  out_of_range,
  empty_result,
  unknown_assessor,
  io_error,
  schema_error,
  duplicate_image_id,
  empty_input,
  invalid_query,
  http_error,
  not_an_image,
  transport_error,
  quota_exceeded,
  auth_error,
  rate_limited,
  timeout,
  bad_request,
  missing_truth,
  no_rating_found,
  store_io_error,
  duplicate_record,
  unknown_image,
  conflicting_rating,
  zero_variance,
  degenerate_matrix,
  pole,
  no_valid_combination,
  insufficient_data,
  missing_reference,
  usage_error,
  unknown_format,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-checkable kind.
// Messages never include API keys or URLs that embed them.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace psci
