#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mka::text {

// Decodes UTF-8 into code points. Invalid sequences become U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view s);

std::string utf8_encode(const char32_t* data, std::size_t count);
std::string utf8_encode(const std::vector<char32_t>& cps);

bool is_space(char32_t c);

// Canonical form used for n-gram features: NFC composition, per-codepoint
// lowercasing, surrounding whitespace trimmed.
std::vector<char32_t> normalize(std::string_view s);
std::string normalize_utf8(std::string_view s);

// Byte-level ASCII whitespace trim.
std::string_view trim(std::string_view s);

}  // namespace mka::text
