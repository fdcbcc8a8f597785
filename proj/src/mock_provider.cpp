#include "psci/mock_provider.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace psci {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the running hash.
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

std::uint64_t noise_seed(std::uint64_t seed, const std::string& image_id, int run_index) {
  std::uint64_t h = mix(0, seed);
  for (unsigned char c : image_id) h = mix(h, c);
  return mix(h, static_cast<std::uint64_t>(run_index) + 1);
}

int clip(long value) {
  return static_cast<int>(std::clamp<long>(value, kMinRating, kMaxRating));
}

}  // namespace

MockBackend::MockBackend(MockProviderSpec spec) : spec_(std::move(spec)) {}

int MockBackend::truth_for(const std::string& image_id) const {
  auto it = spec_.truth.find(image_id);
  if (it == spec_.truth.end()) throw Error(ErrorKind::missing_truth, image_id);
  return it->second.value();
}

std::string MockBackend::reply_for(const std::string& image_id, int run_index,
                                   std::size_t user_turns) const {
  using Mode = MockProviderSpec::Mode;
  switch (spec_.mode) {
    case Mode::echo_truth:
      return std::to_string(truth_for(image_id));
    case Mode::fixed:
      return std::to_string(spec_.fixed_value);
    case Mode::offset:
      return std::to_string(clip(truth_for(image_id) + spec_.delta));
    case Mode::noisy: {
      const int truth = truth_for(image_id);
      double g = 0.0;
      if (spec_.sigma > 0) {
        std::mt19937_64 rng(noise_seed(spec_.seed, image_id, run_index));
        std::normal_distribution<double> dist(0.0, spec_.sigma);
        g = dist(rng);
      }
      return std::to_string(clip(std::lround(truth + g)));
    }
    case Mode::malformed_then_valid: {
      const int truth = truth_for(image_id);
      if (user_turns <= static_cast<std::size_t>(spec_.n_bad)) return kMockMalformedReply;
      return std::to_string(truth);
    }
  }
  return {};
}

AttemptOutcome MockBackend::send(const ChatRequest& request, const ProviderConfig&) {
  return AttemptOutcome::success(
      reply_for(request.image.image_id, request.run_index, request.user_turns()));
}

std::optional<MockProviderSpec::Mode> parse_mock_mode(std::string_view text) {
  using Mode = MockProviderSpec::Mode;
  if (text == "echo-truth" || text == "echo_truth") return Mode::echo_truth;
  if (text == "fixed") return Mode::fixed;
  if (text == "offset") return Mode::offset;
  if (text == "noisy") return Mode::noisy;
  if (text == "malformed-then-valid" || text == "malformed_then_valid") {
    return Mode::malformed_then_valid;
  }
  return std::nullopt;
}

LlmProvider make_mock_provider(MockProviderSpec spec) {
  if (spec.mode == MockProviderSpec::Mode::fixed) validate_rating(spec.fixed_value);
  if (spec.sigma < 0 || !std::isfinite(spec.sigma)) {
    throw Error(ErrorKind::usage_error, "noisy sigma must be >= 0");
  }
  if (spec.n_bad < 0) throw Error(ErrorKind::usage_error, "n_bad must be >= 0");
  ProviderConfig config;
  config.model_name = "mock";
  config.backoff_base = std::chrono::duration<double>(0);
  return LlmProvider(config, std::make_shared<MockBackend>(std::move(spec)));
}

}  // namespace psci
