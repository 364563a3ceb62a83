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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace obfuscan {

enum class CharsetId : std::uint8_t {
  /// The 65 characters a Java name may legally be contracted from:
  /// a-z, A-Z, 0-9, `_`, `$`, `\`.
  Identifier,
  /// All ASCII code points 0..127; arbitrary string content.
  Ascii,
};

std::string_view to_string(CharsetId id);

/// Placeholder an out-of-range code point collapses to before windowing
/// under the Ascii charset (non-ASCII presence is itself signal).
inline constexpr char32_t kAsciiBucketChar = 0x7F;

class Charset {
 public:
  static const Charset& identifier();
  static const Charset& ascii();
  static const Charset& by_id(CharsetId id);

  CharsetId id() const { return id_; }
  bool contains(char32_t cp) const;
  const std::vector<char32_t>& members() const { return members_; }

 private:
  Charset(CharsetId id, std::vector<char32_t> members);

  CharsetId id_;
  std::vector<char32_t> members_;
  bool ascii_table_[128] = {};
};

/// Sparse normalized 3-gram frequency map. Keys are the 3 characters of
/// the gram (all charset members are ASCII, so one byte per character);
/// canonical ordering is lexicographic by code point via std::map.
struct FeatureVector {
  CharsetId charset_id = CharsetId::Identifier;
  std::map<std::string, double> counts;
  bool normalized = false;

  bool operator==(const FeatureVector&) const = default;
};

/// Slides a width-3 window over each string independently (no cross-string
/// grams). Characters outside the charset split a string into segments,
/// each windowed separately; under Ascii, code points above 127 first
/// collapse to kAsciiBucketChar instead of splitting. Accumulated counts
/// are divided by the total gram count. Strings shorter than the window
/// contribute nothing; an all-short input yields an empty vector.
FeatureVector featurize(const std::vector<std::string>& names, const Charset& charset);

}  // namespace obfuscan
