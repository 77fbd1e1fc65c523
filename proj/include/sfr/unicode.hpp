#pragma once

#include <string>
#include <string_view>

namespace sfr::unicode {

inline constexpr char32_t kMaxCodePoint = 0x10FFFF;

// Lenient decode; ill-formed sequences become U+FFFD.
std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);

// Byte offset of the first ill-formed UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view bytes);

std::u32string nfc(std::u32string_view text);

bool is_whitespace(char32_t c);
bool is_punctuation(char32_t c);  // general category P*
bool is_other(char32_t c);        // general category C*

std::u32string to_lower(std::u32string_view text);

// "U+0915" style rendering.
std::string code_point_label(char32_t c);

}  // namespace sfr::unicode
