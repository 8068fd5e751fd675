#pragma once

#include <string>
#include <string_view>

namespace hardatt {

// Decodes UTF-8 into Unicode scalar values. Throws DataError on invalid input.
std::u32string utf8_decode(std::string_view bytes);

std::string utf8_encode(std::u32string_view chars);
std::string utf8_encode(char32_t ch);

}  // namespace hardatt
