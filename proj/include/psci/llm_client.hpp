#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psci/error.hpp"
#include "psci/http_transport.hpp"
#include "psci/image.hpp"
#include "psci/prompt.hpp"

namespace psci {

struct ProviderConfig {
  std::string base_url;
  std::string model_name;
  std::string api_key;  // never logged or persisted
  std::optional<double> temperature;
  std::chrono::milliseconds request_timeout{120'000};
  int max_attempts = 3;
  std::chrono::duration<double> backoff_base{1.0};
};

// Throws Error(usage_error) when max_attempts < 1 or the timeout is not positive.
void validate_provider_config(const ProviderConfig& config);

struct AssessmentRequest {
  PromptBundle bundle;
  EncodedImage image;
};

struct ChatTurn {
  enum class Role { user, assistant };
  Role role = Role::user;
  std::string text;
};

// A conversation about one image. turns[0] is the prompt's user text; the
// image is attached where the placeholder sits. Later turns carry corrective
// follow-ups.
struct ChatRequest {
  std::string system_text;
  std::vector<ChatTurn> turns;
  EncodedImage image;
  // Routing context used only by deterministic test doubles.
  int run_index = 0;

  std::size_t user_turns() const;
};

ChatRequest make_chat_request(const AssessmentRequest& request, int run_index = 0);

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct AssessmentResponse {
  std::string raw_text;
  std::chrono::duration<double> latency{0.0};
  std::optional<TokenUsage> token_usage;
  int attempts_used = 1;
};

// Result of one round trip, before retry policy is applied.
struct AttemptOutcome {
  enum class Status { ok, http_status, timeout, transport };
  Status status = Status::ok;
  int http_status = 200;
  std::string text;  // completion on ok, diagnostic otherwise
  std::optional<TokenUsage> token_usage;

  static AttemptOutcome success(std::string text, std::optional<TokenUsage> usage = {});
  static AttemptOutcome http(int status, std::string detail = {});
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // May throw Error for non-HTTP failures (e.g. a mock missing its truth).
  virtual AttemptOutcome send(const ChatRequest& request, const ProviderConfig& config) = 0;
};

// Failure after the retry policy gave up. Kinds: auth_error, rate_limited,
// timeout, bad_request, transport_error, or a backend-raised kind.
class ProviderError : public Error {
 public:
  ProviderError(ErrorKind kind, const std::string& detail, int attempts_used)
      : Error(kind, detail), attempts_used_(attempts_used) {}
  int attempts_used() const noexcept { return attempts_used_; }

 private:
  int attempts_used_;
};

using Sleeper = std::function<void(std::chrono::duration<double>)>;

// Shareable provider handle. Applies retries with full-jitter exponential
// backoff: before retry n (n >= 1) it sleeps uniform(0, base * 2^(n-1)).
// HTTP 429, 5xx and timeouts are retried; 400/401/403/404 and transport
// failures are not.
class LlmProvider {
 public:
  LlmProvider(ProviderConfig config, std::shared_ptr<ChatBackend> backend, Sleeper sleeper = {});

  AssessmentResponse complete(const ChatRequest& request) const;

  const ProviderConfig& config() const noexcept { return config_; }
  // "<model_name> @ <base_url>", safe to log.
  std::string descriptor() const;
  // Round trips attempted through this handle and its copies.
  std::uint64_t calls() const noexcept { return calls_->load(); }

 private:
  ProviderConfig config_;
  std::shared_ptr<ChatBackend> backend_;
  Sleeper sleeper_;
  std::shared_ptr<std::atomic<std::uint64_t>> calls_;
};

AssessmentResponse assess_image(const LlmProvider& provider, const AssessmentRequest& request);

// OpenAI-compatible chat completions: POST <base_url>/chat/completions with
// bearer auth; the image travels as a data URL inside an image_url part.
std::shared_ptr<ChatBackend> make_chat_completions_backend(std::shared_ptr<HttpTransport> http);
LlmProvider make_http_provider(ProviderConfig config, std::shared_ptr<HttpTransport> http,
                               Sleeper sleeper = {});

// Exposed for tests of the wire format.
std::string build_chat_completions_body(const ChatRequest& request, const ProviderConfig& config);
// Extracts choices[0].message.content (string or text parts) and usage.
// Throws Error(transport_error) on a malformed body.
AttemptOutcome parse_chat_completions_body(const std::string& body);

// Replaces every occurrence of secret with "***".
std::string redact(std::string text, const std::string& secret);

}  // namespace psci
