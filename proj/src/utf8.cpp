/*
 * Copyright (C) 2026 The Obfuscan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "obfuscan/utf8.hpp"

namespace obfuscan {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at s[i]; advances i past the consumed
// bytes (at least one).
char32_t decode_one(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<std::uint8_t>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
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
    ++i;
    return kReplacement;
  }
  if (i + static_cast<std::size_t>(len) > s.size()) {
    ++i;
    return kReplacement;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<std::uint8_t>(s[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlong forms and out-of-range values.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return kReplacement;
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

void encode_one(char32_t cp, std::string& out) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = kReplacement;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) out.push_back(decode_one(s, i));
  return out;
}

std::string utf8_encode(std::span<const char32_t> cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) encode_one(cp, out);
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0, i = 0;
  while (i < s.size()) {
    decode_one(s, i);
    ++n;
  }
  return n;
}

std::string mutf8_to_utf8(std::span<const std::uint8_t> bytes) {
  // First pass: MUTF-8 to UTF-16 code units.
  std::vector<char16_t> units;
  units.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const std::uint8_t b0 = bytes[i];
    if (b0 == 0) break;  // dex strings are NUL-terminated
    if (b0 < 0x80) {
      units.push_back(b0);
      ++i;
    } else if ((b0 & 0xE0) == 0xC0 && i + 1 < bytes.size() &&
               (bytes[i + 1] & 0xC0) == 0x80) {
      units.push_back(static_cast<char16_t>(((b0 & 0x1F) << 6) | (bytes[i + 1] & 0x3F)));
      i += 2;
    } else if ((b0 & 0xF0) == 0xE0 && i + 2 < bytes.size() &&
               (bytes[i + 1] & 0xC0) == 0x80 && (bytes[i + 2] & 0xC0) == 0x80) {
      units.push_back(static_cast<char16_t>(((b0 & 0x0F) << 12) |
                                            ((bytes[i + 1] & 0x3F) << 6) |
                                            (bytes[i + 2] & 0x3F)));
      i += 3;
    } else {
      units.push_back(static_cast<char16_t>(kReplacement));
      ++i;
    }
  }
  // Second pass: combine surrogate pairs, then re-encode.
  std::string out;
  out.reserve(units.size());
  for (std::size_t k = 0; k < units.size(); ++k) {
    const char16_t u = units[k];
    if (u >= 0xD800 && u <= 0xDBFF && k + 1 < units.size() &&
        units[k + 1] >= 0xDC00 && units[k + 1] <= 0xDFFF) {
      const char32_t cp = 0x10000 + ((static_cast<char32_t>(u) - 0xD800) << 10) +
                          (static_cast<char32_t>(units[k + 1]) - 0xDC00);
      encode_one(cp, out);
      ++k;
    } else if (u >= 0xD800 && u <= 0xDFFF) {
      encode_one(kReplacement, out);
    } else {
      encode_one(u, out);
    }
  }
  return out;
}

}  // namespace obfuscan
