#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace psci {

struct HttpResponse {
  int status = 0;
  std::string content_type;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// Blocking HTTP client seam. Implementations throw Error(timeout) when the
// request exceeds its deadline and Error(transport_error) for connection
// failures; any HTTP status, including errors, is returned normally.
// Implementations must be safe to call from several threads at once.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url, const HttpHeaders& headers,
                           std::chrono::milliseconds timeout) = 0;
  virtual HttpResponse post(const std::string& url, const HttpHeaders& headers,
                            const std::string& body, const std::string& content_type,
                            std::chrono::milliseconds timeout) = 0;
};

// cpp-httplib backed transport with HTTPS support.
std::shared_ptr<HttpTransport> make_http_transport();

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

// Throws Error(transport_error) for URLs without an http(s) scheme.
SplitUrl split_url(const std::string& url);

}  // namespace psci
