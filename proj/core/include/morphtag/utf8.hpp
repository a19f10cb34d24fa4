#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace morphtag::utf8 {

// Decodes UTF-8 into Unicode scalar values. Invalid sequences (overlong
// encodings, surrogates, truncation, out-of-range) raise std::runtime_error.
std::vector<char32_t> decode(std::string_view text);

// True iff the text is well-formed UTF-8.
bool valid(std::string_view text);

std::string encode(char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

// Character classes used by the casing rules. Covers ASCII, Latin-1 and
// Latin Extended-A; anything else counts as uncased / non-digit.
bool is_digit(char32_t c);
bool is_lower(char32_t c);
bool is_upper(char32_t c);

}  // namespace morphtag::utf8
