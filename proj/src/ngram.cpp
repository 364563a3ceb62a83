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

#include "obfuscan/ngram.hpp"

#include "obfuscan/utf8.hpp"

namespace obfuscan {

std::string_view to_string(CharsetId id) {
  return id == CharsetId::Identifier ? "identifier" : "ascii";
}

Charset::Charset(CharsetId id, std::vector<char32_t> members)
    : id_(id), members_(std::move(members)) {
  for (char32_t c : members_) {
    if (c < 128) ascii_table_[c] = true;
  }
}

bool Charset::contains(char32_t cp) const {
  return cp < 128 && ascii_table_[cp];
}

const Charset& Charset::identifier() {
  static const Charset cs = [] {
    std::vector<char32_t> m;
    for (char32_t c = 'a'; c <= 'z'; ++c) m.push_back(c);
    for (char32_t c = 'A'; c <= 'Z'; ++c) m.push_back(c);
    for (char32_t c = '0'; c <= '9'; ++c) m.push_back(c);
    m.push_back('_');
    m.push_back('$');
    m.push_back('\\');
    return Charset(CharsetId::Identifier, std::move(m));
  }();
  return cs;
}

const Charset& Charset::ascii() {
  static const Charset cs = [] {
    std::vector<char32_t> m;
    for (char32_t c = 0; c < 128; ++c) m.push_back(c);
    return Charset(CharsetId::Ascii, std::move(m));
  }();
  return cs;
}

const Charset& Charset::by_id(CharsetId id) {
  return id == CharsetId::Identifier ? identifier() : ascii();
}

FeatureVector featurize(const std::vector<std::string>& names, const Charset& charset) {
  FeatureVector fv;
  fv.charset_id = charset.id();
  std::map<std::string, double> raw;
  double total = 0.0;

  std::string window;
  for (const auto& name : names) {
    window.clear();
    for (char32_t cp : utf8_decode(name)) {
      if (charset.id() == CharsetId::Ascii && cp > 127) cp = kAsciiBucketChar;
      if (!charset.contains(cp)) {
        window.clear();  // segment boundary: no gram crosses it
        continue;
      }
      window.push_back(static_cast<char>(cp));
      if (window.size() > 3) window.erase(window.begin());
      if (window.size() == 3) {
        raw[window] += 1.0;
        total += 1.0;
      }
    }
    window.clear();  // no cross-string grams
  }

  if (total > 0.0) {
    for (auto& [gram, count] : raw) count /= total;
  }
  fv.counts = std::move(raw);
  fv.normalized = true;
  return fv;
}

}  // namespace obfuscan
