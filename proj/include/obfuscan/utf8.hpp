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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace obfuscan {

/// Decodes UTF-8 into code points. Malformed sequences decode to U+FFFD,
/// one replacement per offending byte, so the result is always defined.
std::vector<char32_t> utf8_decode(std::string_view s);

/// Encodes code points back to UTF-8.
std::string utf8_encode(std::span<const char32_t> cps);

std::size_t utf8_length(std::string_view s);

/// Converts the modified UTF-8 used inside dex string pools (CESU-8
/// surrogate pairs, 0xC0 0x80 for NUL) to standard UTF-8.
std::string mutf8_to_utf8(std::span<const std::uint8_t> bytes);

}  // namespace obfuscan
