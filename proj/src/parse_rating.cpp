#include "psci/error.hpp"
#include "psci/runner.hpp"

namespace psci {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::optional<Rating> try_parse_rating(std::string_view text) noexcept {
  std::optional<Rating> last;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && is_digit(text[i])) ++i;
    const std::size_t end = i;

    const bool decimal_tail = begin >= 2 && text[begin - 1] == '.' && is_digit(text[begin - 2]);
    const bool decimal_head = end + 1 < text.size() && text[end] == '.' && is_digit(text[end + 1]);
    if (decimal_tail || decimal_head) continue;

    std::size_t first = begin;
    while (first + 1 < end && text[first] == '0') ++first;
    if (end - first > 2) continue;
    int value = 0;
    for (std::size_t k = first; k < end; ++k) value = value * 10 + (text[k] - '0');
    if (value >= kMinRating && value <= kMaxRating) last = validate_rating(value);
  }
  return last;
}

Rating parse_rating(std::string_view raw_text) {
  if (auto r = try_parse_rating(raw_text)) return *r;
  std::string shown(raw_text.substr(0, 120));
  throw Error(ErrorKind::no_rating_found, shown);
}

}  // namespace psci
