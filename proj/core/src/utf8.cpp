#include "morphtag/utf8.hpp"

#include <stdexcept>

namespace morphtag::utf8 {

namespace {

[[noreturn]] void bad(size_t pos) {
  throw std::runtime_error("invalid UTF-8 sequence at byte offset " + std::to_string(pos));
}

}  // namespace

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      bad(i);
    }
    if (i + len > text.size()) bad(i);
    for (int k = 1; k < len; ++k) {
      unsigned char b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) bad(i);
      cp = (cp << 6) | (b & 0x3F);
    }
    // reject overlong encodings, surrogates and out-of-range values
    if (len == 2 && cp < 0x80) bad(i);
    if (len == 3 && cp < 0x800) bad(i);
    if (len == 4 && cp < 0x10000) bad(i);
    if (cp >= 0xD800 && cp <= 0xDFFF) bad(i);
    if (cp > 0x10FFFF) bad(i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

bool valid(std::string_view text) {
  try {
    decode(text);
    return true;
  } catch (const std::runtime_error&) {
    return false;
  }
}

std::string encode(char32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xF0 | (cp >> 18));
    s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return s;
}

std::string encode(const std::vector<char32_t>& cps) {
  std::string s;
  for (char32_t cp : cps) s += encode(cp);
  return s;
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_lower(char32_t c) {
  if (c >= U'a' && c <= U'z') return true;
  if (c >= 0xDF && c <= 0xFF && c != 0xF7) return true;  // Latin-1 lowercase
  if (c >= 0x100 && c <= 0x137) return (c & 1) == 1;     // Latin Ext-A pairs
  if (c >= 0x139 && c <= 0x148) return (c & 1) == 0;
  if (c >= 0x14A && c <= 0x177) return (c & 1) == 1;
  if (c == 0x17A || c == 0x17C || c == 0x17E || c == 0x17F) return true;
  if (c == 0x131 || c == 0x138 || c == 0x149) return true;
  return false;
}

bool is_upper(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return true;  // Latin-1 uppercase
  if (c >= 0x100 && c <= 0x137) return (c & 1) == 0;
  if (c >= 0x139 && c <= 0x148) return (c & 1) == 1;
  if (c >= 0x14A && c <= 0x177) return (c & 1) == 0;
  if (c == 0x178 || c == 0x179 || c == 0x17B || c == 0x17D) return true;
  return false;
}

}  // namespace morphtag::utf8
