#include "psci/llm_client.hpp"

#include <cmath>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

namespace psci {

using nlohmann::json;

void validate_provider_config(const ProviderConfig& config) {
  if (config.max_attempts < 1) throw Error(ErrorKind::usage_error, "max_attempts must be >= 1");
  if (config.request_timeout.count() <= 0) {
    throw Error(ErrorKind::usage_error, "request_timeout must be positive");
  }
  if (config.backoff_base.count() < 0) throw Error(ErrorKind::usage_error, "backoff_base must be >= 0");
  if (config.temperature && *config.temperature < 0) {
    throw Error(ErrorKind::usage_error, "temperature must be >= 0");
  }
}

std::size_t ChatRequest::user_turns() const {
  std::size_t n = 0;
  for (const auto& t : turns) n += t.role == ChatTurn::Role::user;
  return n;
}

ChatRequest make_chat_request(const AssessmentRequest& request, int run_index) {
  if (request.image.base64_payload.empty()) {
    throw Error(ErrorKind::empty_input, "image " + request.image.image_id + " has no payload");
  }
  ChatRequest out;
  out.system_text = request.bundle.system_text;
  out.turns.push_back({ChatTurn::Role::user, request.bundle.user_text});
  out.image = request.image;
  out.run_index = run_index;
  return out;
}

AttemptOutcome AttemptOutcome::success(std::string text, std::optional<TokenUsage> usage) {
  AttemptOutcome o;
  o.text = std::move(text);
  o.token_usage = usage;
  return o;
}

AttemptOutcome AttemptOutcome::http(int status, std::string detail) {
  AttemptOutcome o;
  o.status = Status::http_status;
  o.http_status = status;
  o.text = std::move(detail);
  return o;
}

std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos + 3)) {
    text.replace(pos, secret.size(), "***");
  }
  return text;
}

namespace {

void default_sleep(std::chrono::duration<double> d) {
  std::this_thread::sleep_for(d);
}

std::chrono::duration<double> jittered_backoff(std::chrono::duration<double> base, int retry) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const double cap = base.count() * std::ldexp(1.0, retry - 1);
  if (cap <= 0) return std::chrono::duration<double>(0);
  std::uniform_real_distribution<double> dist(0.0, cap);
  return std::chrono::duration<double>(dist(rng));
}

bool is_transient(const AttemptOutcome& o) {
  if (o.status == AttemptOutcome::Status::timeout) return true;
  if (o.status != AttemptOutcome::Status::http_status) return false;
  return o.http_status == 429 || (o.http_status >= 500 && o.http_status <= 599);
}

std::string truncate(std::string s, std::size_t n = 200) {
  if (s.size() > n) s.resize(n);
  return s;
}

}  // namespace

LlmProvider::LlmProvider(ProviderConfig config, std::shared_ptr<ChatBackend> backend, Sleeper sleeper)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper(default_sleep)),
      calls_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  validate_provider_config(config_);
  if (!backend_) throw Error(ErrorKind::usage_error, "provider has no backend");
}

std::string LlmProvider::descriptor() const {
  return config_.model_name + " @ " + (config_.base_url.empty() ? "<none>" : config_.base_url);
}

AssessmentResponse LlmProvider::complete(const ChatRequest& request) const {
  const auto start = std::chrono::steady_clock::now();
  AttemptOutcome last;
  int attempt = 0;
  while (attempt < config_.max_attempts) {
    if (attempt > 0) sleeper_(jittered_backoff(config_.backoff_base, attempt));
    ++attempt;
    calls_->fetch_add(1);
    try {
      last = backend_->send(request, config_);
    } catch (const Error& e) {
      throw ProviderError(e.kind(), redact(e.detail(), config_.api_key), attempt);
    }
    if (last.status == AttemptOutcome::Status::ok) {
      AssessmentResponse response;
      response.raw_text = std::move(last.text);
      response.token_usage = last.token_usage;
      response.attempts_used = attempt;
      response.latency = std::chrono::steady_clock::now() - start;
      return response;
    }
    if (!is_transient(last)) break;
  }

  const auto detail = redact(truncate(last.text), config_.api_key);
  switch (last.status) {
    case AttemptOutcome::Status::timeout:
      throw ProviderError(ErrorKind::timeout, "request timed out", attempt);
    case AttemptOutcome::Status::transport:
      throw ProviderError(ErrorKind::transport_error, detail, attempt);
    case AttemptOutcome::Status::http_status: {
      const int s = last.http_status;
      const auto msg = "HTTP " + std::to_string(s) + (detail.empty() ? "" : ": " + detail);
      if (s == 401 || s == 403) throw ProviderError(ErrorKind::auth_error, msg, attempt);
      if (s == 429) throw ProviderError(ErrorKind::rate_limited, msg, attempt);
      if (s >= 500) throw ProviderError(ErrorKind::transport_error, msg, attempt);
      throw ProviderError(ErrorKind::bad_request, msg, attempt);
    }
    case AttemptOutcome::Status::ok:
      break;
  }
  throw ProviderError(ErrorKind::transport_error, "unreachable", attempt);
}

AssessmentResponse assess_image(const LlmProvider& provider, const AssessmentRequest& request) {
  return provider.complete(make_chat_request(request));
}

std::string build_chat_completions_body(const ChatRequest& request, const ProviderConfig& config) {
  json messages = json::array();
  if (!request.system_text.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_text}});
  }
  bool image_attached = false;
  for (const auto& turn : request.turns) {
    if (turn.role == ChatTurn::Role::assistant) {
      messages.push_back({{"role", "assistant"}, {"content", turn.text}});
      continue;
    }
    if (image_attached) {
      messages.push_back({{"role", "user"}, {"content", turn.text}});
      continue;
    }
    // First user turn: split around the placeholder and insert the image.
    json parts = json::array();
    const auto pos = turn.text.find(kImagePlaceholder);
    const auto before = pos == std::string::npos ? turn.text : turn.text.substr(0, pos);
    const auto after =
        pos == std::string::npos ? std::string() : turn.text.substr(pos + kImagePlaceholder.size());
    if (!before.empty()) parts.push_back({{"type", "text"}, {"text", before}});
    parts.push_back({{"type", "image_url"}, {"image_url", {{"url", request.image.data_url()}}}});
    if (!after.empty()) parts.push_back({{"type", "text"}, {"text", after}});
    messages.push_back({{"role", "user"}, {"content", std::move(parts)}});
    image_attached = true;
  }
  json body = {{"model", config.model_name}, {"messages", std::move(messages)}};
  if (config.temperature) body["temperature"] = *config.temperature;
  return body.dump();
}

AttemptOutcome parse_chat_completions_body(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw Error(ErrorKind::transport_error, "response is not JSON");
  }
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    std::string text;
    if (content.is_string()) {
      text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.value("type", "") == "text") text += part.value("text", "");
      }
    } else if (!content.is_null()) {
      throw Error(ErrorKind::transport_error, "unexpected content type");
    }
    std::optional<TokenUsage> usage;
    if (auto u = doc.find("usage"); u != doc.end() && u->is_object()) {
      usage = TokenUsage{u->value("prompt_tokens", 0), u->value("completion_tokens", 0)};
    }
    return AttemptOutcome::success(std::move(text), usage);
  } catch (const json::exception&) {
    throw Error(ErrorKind::transport_error, "response lacks choices[0].message.content");
  }
}

namespace {

class ChatCompletionsBackend final : public ChatBackend {
 public:
  explicit ChatCompletionsBackend(std::shared_ptr<HttpTransport> http) : http_(std::move(http)) {}

  AttemptOutcome send(const ChatRequest& request, const ProviderConfig& config) override {
    auto url = config.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    url += "/chat/completions";
    HttpHeaders headers = {{"Authorization", "Bearer " + config.api_key}};
    HttpResponse response;
    try {
      response = http_->post(url, headers, build_chat_completions_body(request, config),
                             "application/json", config.request_timeout);
    } catch (const Error& e) {
      AttemptOutcome o;
      o.status = e.kind() == ErrorKind::timeout ? AttemptOutcome::Status::timeout
                                                : AttemptOutcome::Status::transport;
      o.text = e.detail();
      return o;
    }
    if (response.status != 200) return AttemptOutcome::http(response.status, response.body);
    return parse_chat_completions_body(response.body);
  }

 private:
  std::shared_ptr<HttpTransport> http_;
};

}  // namespace

std::shared_ptr<ChatBackend> make_chat_completions_backend(std::shared_ptr<HttpTransport> http) {
  return std::make_shared<ChatCompletionsBackend>(std::move(http));
}

LlmProvider make_http_provider(ProviderConfig config, std::shared_ptr<HttpTransport> http,
                               Sleeper sleeper) {
  if (config.base_url.empty()) throw Error(ErrorKind::usage_error, "provider base URL is not set");
  if (config.model_name.empty()) throw Error(ErrorKind::usage_error, "provider model is not set");
  return LlmProvider(std::move(config), make_chat_completions_backend(std::move(http)),
                     std::move(sleeper));
}

}  // namespace psci
