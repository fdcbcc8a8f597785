#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "psci/error.hpp"
#include "psci/llm_client.hpp"
#include "psci/mock_provider.hpp"
#include "psci/rubric.hpp"
#include "support/test_support.hpp"

using namespace psci;
using psci::testing::StubTransport;

namespace {

const std::string kKey = "sk-test-SECRET-0123456789";

EncodedImage image(const std::string& id = "img0") { return encode_image(id, psci::testing::fake_jpeg(64)); }

ChatRequest request(const std::string& id = "img0", int run = 0) {
  auto bundle = render_prompt(builtin_model_config("model2"), builtin_psci_rubric());
  return make_chat_request({bundle, image(id)}, run);
}

ProviderConfig config(int attempts = 3) {
  ProviderConfig c;
  c.base_url = "http://llm.invalid/v1";
  c.model_name = "vision-test";
  c.api_key = kKey;
  c.max_attempts = attempts;
  c.backoff_base = std::chrono::duration<double>(0.5);
  return c;
}

std::string completion(const std::string& text) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}},
                        {"usage", {{"prompt_tokens", 900}, {"completion_tokens", 1}}}}
      .dump();
}

struct SleepLog {
  std::vector<double> seconds;
  Sleeper sleeper() {
    return [this](std::chrono::duration<double> d) { seconds.push_back(d.count()); };
  }
};

class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<AttemptOutcome> script) : script_(std::move(script)) {}
  AttemptOutcome send(const ChatRequest&, const ProviderConfig&) override {
    auto i = std::min(calls++, script_.size() - 1);
    return script_[i];
  }
  std::size_t calls = 0;

 private:
  std::vector<AttemptOutcome> script_;
};

AttemptOutcome timeout_outcome() {
  AttemptOutcome o;
  o.status = AttemptOutcome::Status::timeout;
  return o;
}

}  // namespace

TEST(WireFormat, SystemAndMixedUserParts) {
  auto body = nlohmann::json::parse(build_chat_completions_body(request(), config()));
  EXPECT_EQ(body["model"], "vision-test");
  EXPECT_FALSE(body.contains("temperature"));
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  const auto& parts = body["messages"][1]["content"];
  int images = 0;
  for (const auto& p : parts) {
    if (p["type"] == "image_url") {
      ++images;
      EXPECT_EQ(p["image_url"]["url"].get<std::string>().rfind("data:image/jpeg;base64,", 0), 0u);
    } else {
      EXPECT_EQ(p["text"].get<std::string>().find(kImagePlaceholder), std::string::npos);
    }
  }
  EXPECT_EQ(images, 1);
  EXPECT_EQ(body.dump().find(kKey), std::string::npos);
}

TEST(WireFormat, NoSystemMessageWhenEmptyAndTemperatureWhenSet) {
  auto bundle = render_prompt(builtin_model_config("model1"), builtin_psci_rubric());
  auto req = make_chat_request({bundle, image()});
  auto c = config();
  c.temperature = 0.0;
  auto body = nlohmann::json::parse(build_chat_completions_body(req, c));
  ASSERT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["temperature"], 0.0);
}

TEST(WireFormat, FollowUpTurnsArePlainText) {
  auto req = request();
  req.turns.push_back({ChatTurn::Role::assistant, "hmm"});
  req.turns.push_back({ChatTurn::Role::user, std::string(kCorrectiveFollowUp)});
  EXPECT_EQ(req.user_turns(), 2u);
  auto body = nlohmann::json::parse(build_chat_completions_body(req, config()));
  ASSERT_EQ(body["messages"].size(), 4u);
  EXPECT_EQ(body["messages"][2]["role"], "assistant");
  EXPECT_EQ(body["messages"][3]["content"], std::string(kCorrectiveFollowUp));
}

TEST(WireFormat, ParsesStringAndPartContent) {
  auto a = parse_chat_completions_body(completion("7"));
  EXPECT_TRUE(a.status == AttemptOutcome::Status::ok);
  EXPECT_EQ(a.text, "7");
  ASSERT_TRUE(a.token_usage.has_value());
  EXPECT_EQ(a.token_usage->prompt_tokens, 900);
  auto b = parse_chat_completions_body(
      R"({"choices":[{"message":{"content":[{"type":"text","text":"Grade: "},{"type":"text","text":"8"}]}}]})");
  EXPECT_EQ(b.text, "Grade: 8");
  EXPECT_THROW(parse_chat_completions_body("{\"choices\":[]}"), Error);
  EXPECT_THROW(parse_chat_completions_body("not json"), Error);
}

TEST(MakeChatRequest, EmptyImageRejected) {
  auto bundle = render_prompt(builtin_model_config("model1"), builtin_psci_rubric());
  EncodedImage empty;
  EXPECT_THROW(make_chat_request({bundle, empty}), Error);
}

TEST(ProviderConfigCheck, Invariants) {
  auto c = config(0);
  EXPECT_THROW(validate_provider_config(c), Error);
  c = config();
  c.request_timeout = std::chrono::milliseconds(0);
  EXPECT_THROW(validate_provider_config(c), Error);
}

TEST(Retry, RateLimitedTwiceThenSuccess) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<AttemptOutcome>{
      AttemptOutcome::http(429), AttemptOutcome::http(429), AttemptOutcome::success("6")});
  SleepLog sleeps;
  LlmProvider provider(config(), backend, sleeps.sleeper());
  auto r = provider.complete(request());
  EXPECT_EQ(r.raw_text, "6");
  EXPECT_EQ(r.attempts_used, 3);
  ASSERT_EQ(sleeps.seconds.size(), 2u);
  EXPECT_GE(sleeps.seconds[0], 0.0);
  EXPECT_LE(sleeps.seconds[0], 0.5);
  EXPECT_LE(sleeps.seconds[1], 1.0);
  EXPECT_EQ(provider.calls(), 3u);
}

TEST(Retry, NonTransientStatusesAreNotRetried) {
  const std::pair<int, ErrorKind> cases[] = {
      {401, ErrorKind::auth_error}, {403, ErrorKind::auth_error},
      {400, ErrorKind::bad_request}, {404, ErrorKind::bad_request}};
  for (auto [status, kind] : cases) {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<AttemptOutcome>{AttemptOutcome::http(status)});
    LlmProvider provider(config(), backend, [](auto) {});
    try {
      provider.complete(request());
      FAIL() << status;
    } catch (const ProviderError& e) {
      EXPECT_EQ(e.kind(), kind) << status;
      EXPECT_EQ(e.attempts_used(), 1);
      EXPECT_EQ(backend->calls, 1u);
    }
  }
}

TEST(Retry, ExhaustionKinds) {
  const std::pair<AttemptOutcome, ErrorKind> cases[] = {
      {AttemptOutcome::http(429), ErrorKind::rate_limited},
      {AttemptOutcome::http(503), ErrorKind::transport_error},
      {timeout_outcome(), ErrorKind::timeout}};
  for (const auto& [outcome, kind] : cases) {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<AttemptOutcome>{outcome});
    SleepLog sleeps;
    LlmProvider provider(config(4), backend, sleeps.sleeper());
    try {
      provider.complete(request());
      FAIL();
    } catch (const ProviderError& e) {
      EXPECT_EQ(e.kind(), kind);
      EXPECT_EQ(e.attempts_used(), 4);
      EXPECT_EQ(backend->calls, 4u);
      EXPECT_EQ(sleeps.seconds.size(), 3u);
      for (std::size_t n = 0; n < sleeps.seconds.size(); ++n) {
        EXPECT_LE(sleeps.seconds[n], 0.5 * (1 << n));
      }
    }
  }
}

TEST(Retry, ErrorsNeverContainTheKey) {
  auto backend = std::make_shared<ScriptedBackend>(
      std::vector<AttemptOutcome>{AttemptOutcome::http(401, "invalid key " + kKey)});
  LlmProvider provider(config(), backend, [](auto) {});
  try {
    provider.complete(request());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).find(kKey), std::string::npos);
  }
  EXPECT_EQ(provider.descriptor().find(kKey), std::string::npos);
}

TEST(HttpBackend, SendsBearerToChatCompletions) {
  auto http = std::make_shared<StubTransport>();
  http->push(200, "application/json", completion("8"));
  auto provider = make_http_provider(config(), http, [](auto) {});
  auto r = provider.complete(request());
  EXPECT_EQ(r.raw_text, "8");
  ASSERT_EQ(http->urls().size(), 1u);
  EXPECT_EQ(http->urls()[0], "http://llm.invalid/v1/chat/completions");
  bool bearer = false;
  const auto headers = http->headers();
  for (const auto& [name, value] : headers[0]) {
    if (name == "Authorization") bearer = value == "Bearer " + kKey;
  }
  EXPECT_TRUE(bearer);
}

TEST(HttpBackend, TransportFailureNotRetried) {
  auto http = std::make_shared<StubTransport>();
  http->push_error(ErrorKind::transport_error);
  auto provider = make_http_provider(config(), http, [](auto) {});
  try {
    provider.complete(request());
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::transport_error);
    EXPECT_EQ(e.attempts_used(), 1);
  }
  EXPECT_EQ(http->calls(), 1);
}

TEST(HttpBackend, MissingEndpointSettingsAreUsageErrors) {
  auto c = config();
  c.base_url.clear();
  EXPECT_THROW(make_http_provider(c, std::make_shared<StubTransport>()), Error);
}

class LoopbackServer {
 public:
  explicit LoopbackServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      auth_ = req.get_header_value("Authorization");
      auto i = std::min<std::size_t>(hits_++, statuses_.size() - 1);
      res.status = statuses_[i];
      if (res.status == 200) {
        res.set_content(completion("The grade is 7"), "application/json");
      } else {
        res.set_content("{\"error\":\"status\"}", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LoopbackServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int hits() const { return hits_; }
  std::string auth() const { return auth_; }

 private:
  httplib::Server server_;
  std::vector<int> statuses_;
  std::atomic<int> hits_{0};
  std::string auth_;
  int port_ = 0;
  std::thread thread_;
};

TEST(Loopback, UnauthorizedIsOneAttempt) {
  LoopbackServer server({401});
  auto c = config();
  c.base_url = server.base_url();
  auto provider = make_http_provider(c, make_http_transport(), [](auto) {});
  try {
    assess_image(provider, {render_prompt(builtin_model_config("model1"), builtin_psci_rubric()), image()});
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::auth_error);
    EXPECT_EQ(e.attempts_used(), 1);
  }
  EXPECT_EQ(server.hits(), 1);
  EXPECT_EQ(server.auth(), "Bearer " + kKey);
}

TEST(Loopback, TwoRateLimitsThenSuccess) {
  LoopbackServer server({429, 429, 200});
  auto c = config();
  c.base_url = server.base_url();
  auto provider = make_http_provider(c, make_http_transport(), [](auto) {});
  auto r = assess_image(provider, {render_prompt(builtin_model_config("model5"), builtin_psci_rubric()), image()});
  EXPECT_EQ(r.raw_text, "The grade is 7");
  EXPECT_EQ(r.attempts_used, 3);
  EXPECT_EQ(server.hits(), 3);
}

TEST(Loopback, ConnectionRefusedIsTransportError) {
  int port;
  {
    LoopbackServer server({200});
    port = std::stoi(server.base_url().substr(17));
  }
  auto c = config();
  c.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  auto provider = make_http_provider(c, make_http_transport(), [](auto) {});
  try {
    provider.complete(request());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::transport_error);
    EXPECT_EQ(std::string(e.what()).find(kKey), std::string::npos);
  }
}

namespace {

MockProviderSpec truth_spec(MockProviderSpec::Mode mode, int truth) {
  MockProviderSpec s;
  s.mode = mode;
  s.truth.emplace("img0", validate_rating(truth));
  return s;
}

}  // namespace

TEST(Mock, EchoTruth) {
  auto p = make_mock_provider(truth_spec(MockProviderSpec::Mode::echo_truth, 7));
  EXPECT_EQ(p.complete(request()).raw_text, "7");
}

TEST(Mock, FixedAndOffsetClip) {
  auto fixed = truth_spec(MockProviderSpec::Mode::fixed, 2);
  fixed.fixed_value = 4;
  EXPECT_EQ(make_mock_provider(fixed).complete(request()).raw_text, "4");
  auto up = truth_spec(MockProviderSpec::Mode::offset, 10);
  up.delta = 1;
  EXPECT_EQ(make_mock_provider(up).complete(request()).raw_text, "10");
  auto down = truth_spec(MockProviderSpec::Mode::offset, 2);
  down.delta = -3;
  EXPECT_EQ(make_mock_provider(down).complete(request()).raw_text, "1");
}

TEST(Mock, NoisyZeroSigmaAndDeterminism) {
  auto s = truth_spec(MockProviderSpec::Mode::noisy, 6);
  s.seed = 42;
  s.sigma = 0.0;
  EXPECT_EQ(make_mock_provider(s).complete(request()).raw_text, "6");
  s.sigma = 1.0;
  MockBackend a(s), b(s);
  for (int run = 0; run < 20; ++run) {
    EXPECT_EQ(a.reply_for("img0", run, 1), a.reply_for("img0", run, 1));
    EXPECT_EQ(a.reply_for("img0", run, 1), b.reply_for("img0", run, 1));
  }
}

TEST(Mock, NoisySpreadsAroundTruth) {
  auto s = truth_spec(MockProviderSpec::Mode::noisy, 5);
  s.seed = 1;
  s.sigma = 1.5;
  MockBackend m(s);
  std::set<std::string> seen;
  for (int run = 0; run < 200; ++run) seen.insert(m.reply_for("img0", run, 1));
  EXPECT_GT(seen.size(), 3u);
}

TEST(Mock, MalformedThenValidByUserTurn) {
  auto s = truth_spec(MockProviderSpec::Mode::malformed_then_valid, 8);
  s.n_bad = 2;
  MockBackend m(s);
  EXPECT_EQ(m.reply_for("img0", 0, 1), kMockMalformedReply);
  EXPECT_EQ(m.reply_for("img0", 0, 2), kMockMalformedReply);
  EXPECT_EQ(m.reply_for("img0", 0, 3), "8");
}

TEST(Mock, MissingTruthRaisedAtCallTime) {
  auto p = make_mock_provider(truth_spec(MockProviderSpec::Mode::echo_truth, 7));
  try {
    p.complete(request("other"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::missing_truth);
  }
}

TEST(Mock, ModeNames) {
  EXPECT_EQ(parse_mock_mode("echo-truth"), MockProviderSpec::Mode::echo_truth);
  EXPECT_EQ(parse_mock_mode("malformed-then-valid"), MockProviderSpec::Mode::malformed_then_valid);
  EXPECT_FALSE(parse_mock_mode("psychic").has_value());
}
