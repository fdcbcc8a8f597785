#include "psci/http_transport.hpp"

#include <httplib.h>

#include "psci/error.hpp"

namespace psci {

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::transport_error, "URL lacks a scheme");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::transport_error, "unsupported URL scheme " + scheme);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse get(const std::string& url, const HttpHeaders& headers,
                   std::chrono::milliseconds timeout) override {
    auto [origin, target] = split_url(url);
    auto client = make_client(origin, timeout);
    return convert(client.Get(target, to_headers(headers)));
  }

  HttpResponse post(const std::string& url, const HttpHeaders& headers, const std::string& body,
                    const std::string& content_type,
                    std::chrono::milliseconds timeout) override {
    auto [origin, target] = split_url(url);
    auto client = make_client(origin, timeout);
    return convert(client.Post(target, to_headers(headers), body, content_type));
  }

 private:
  static httplib::Client make_client(const std::string& origin, std::chrono::milliseconds timeout) {
    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    return client;
  }

  static httplib::Headers to_headers(const HttpHeaders& headers) {
    httplib::Headers out;
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
  }

  static HttpResponse convert(const httplib::Result& result) {
    if (!result) {
      const auto err = result.error();
      // Error text deliberately omits the URL, which may carry a key.
      if (err == httplib::Error::Read || err == httplib::Error::Write ||
          err == httplib::Error::ConnectionTimeout) {
        throw Error(ErrorKind::timeout, httplib::to_string(err));
      }
      throw Error(ErrorKind::transport_error, httplib::to_string(err));
    }
    HttpResponse out;
    out.status = result->status;
    out.content_type = result->get_header_value("Content-Type");
    out.body = result->body;
    return out;
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() {
  return std::make_shared<HttplibTransport>();
}

}  // namespace psci
