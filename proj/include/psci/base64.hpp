#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace psci {

// Standard alphabet, '=' padding, no line wrapping. Throws Error(empty_input)
// for an empty input.
std::string encode_base64(std::span<const std::uint8_t> bytes);
std::string encode_base64(std::string_view bytes);

// Strict inverse of encode_base64. Throws Error(schema_error) on characters
// outside the alphabet or bad padding.
std::vector<std::uint8_t> decode_base64(std::string_view text);

}  // namespace psci
