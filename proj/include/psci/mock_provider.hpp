#pragma once

#include <map>
#include <string>

#include "psci/llm_client.hpp"
#include "psci/rating.hpp"

namespace psci {

struct MockProviderSpec {
  enum class Mode { echo_truth, fixed, offset, noisy, malformed_then_valid };
  Mode mode = Mode::echo_truth;
  int fixed_value = 6;   // fixed
  int delta = 0;         // offset
  std::uint64_t seed = 0;  // noisy
  double sigma = 0.0;      // noisy
  int n_bad = 0;           // malformed_then_valid
  std::map<std::string, Rating> truth;  // image_id -> rating
};

inline constexpr const char* kMockMalformedReply = "I am unable to give a number for this image.";

// Replies depend only on (image_id, run_index, number of user turns), never
// on call order, so concurrent runs replay identically.
// echo_truth: truth; fixed: the constant; offset: clip(truth + delta);
// noisy: clip(round(truth + g)), g ~ N(0, sigma) seeded from
// (seed, image_id, run_index); malformed_then_valid: non-numeric text for
// the first n_bad user turns, then truth.
// A missing truth entry raises Error(missing_truth) at call time.
class MockBackend final : public ChatBackend {
 public:
  explicit MockBackend(MockProviderSpec spec);
  AttemptOutcome send(const ChatRequest& request, const ProviderConfig& config) override;
  std::string reply_for(const std::string& image_id, int run_index, std::size_t user_turns) const;

 private:
  int truth_for(const std::string& image_id) const;
  MockProviderSpec spec_;
};

std::optional<MockProviderSpec::Mode> parse_mock_mode(std::string_view text);

// Validates the spec (fixed value in range, sigma >= 0, n_bad >= 0).
LlmProvider make_mock_provider(MockProviderSpec spec);

}  // namespace psci
