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

#include "obfuscan/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "obfuscan/dex_parser.hpp"
#include "obfuscan/entropy.hpp"
#include "obfuscan/errors.hpp"
#include "obfuscan/zip_reader.hpp"

namespace obfuscan {

namespace {

bool is_dex_entry_name(std::string_view path) {
  // classes.dex, classes2.dex, ... at the archive root.
  if (!path.starts_with("classes") || !path.ends_with(".dex")) return false;
  const auto mid = path.substr(7, path.size() - 7 - 4);
  return std::all_of(mid.begin(), mid.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

bool LibraryPrefixList::matches(std::string_view class_name) const {
  for (const auto& p : prefixes) {
    if (class_name.starts_with(p)) return true;
  }
  return false;
}

LibraryPrefixList parse_library_prefixes(std::string_view text) {
  LibraryPrefixList list;
  std::unordered_set<std::string_view> seen;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    if (seen.insert(line).second) list.prefixes.emplace_back(line);
  }
  return list;
}

LibraryPrefixList load_library_prefixes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open library prefix list: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_library_prefixes(text);
}

AppModel mark_libraries(const AppModel& app, const LibraryPrefixList& lib_list) {
  AppModel out = app;
  for (auto& cls : out.classes) {
    cls.is_library = lib_list.matches(cls.name);
  }
  return out;
}

bool ApkParseResult::has_warning_containing(std::string_view needle) const {
  return std::any_of(warnings.begin(), warnings.end(), [&](const std::string& w) {
    return w.find(needle) != std::string::npos;
  });
}

ApkParseResult parse_apk(std::span<const std::uint8_t> bytes,
                         const LibraryPrefixList& lib_list,
                         const std::string& app_id) {
  if (bytes.empty()) throw CorruptArchive("empty input");
  const ZipReader zip = ZipReader::open(bytes);

  ApkParseResult result;
  result.model.app_id = app_id;
  result.model.origin = ModelOrigin::DexParsed;

  bool saw_dex_entry = false;
  std::unordered_set<std::string> class_names;
  for (const auto& entry : zip.entries()) {
    FileEntry fe;
    fe.path = entry.path;
    fe.size_bytes = entry.uncompressed_size;

    std::vector<std::uint8_t> content;
    bool have_content = false;
    try {
      content = zip.read(entry);
      have_content = true;
      fe.entropy = file_entropy(content);
    } catch (const CorruptArchive& e) {
      result.warnings.push_back(std::string("entry ") + e.what());
      // Entropy still estimated from whatever bytes are present.
      try {
        fe.entropy = file_entropy(zip.raw(entry));
      } catch (const CorruptArchive&) {
        fe.entropy = 0.0;
      }
    }

    if (is_dex_entry_name(entry.path)) {
      saw_dex_entry = true;
      if (have_content) {
        try {
          auto classes = parse_dex(content);
          for (auto& cls : classes) {
            if (!class_names.insert(cls.name).second) {
              result.warnings.push_back(entry.path + ": duplicate class " + cls.name +
                                        " ignored");
              continue;
            }
            result.model.classes.push_back(std::move(cls));
          }
        } catch (const Error& e) {
          result.warnings.push_back(entry.path + ": " + e.what());
        }
      }
    }
    result.model.file_entries.push_back(std::move(fe));
  }

  if (!saw_dex_entry) {
    result.warnings.push_back(std::string(kNoDexWarning) +
                              ": archive has no classes.dex entry");
  }

  result.model = mark_libraries(result.model, lib_list);
  return result;
}

}  // namespace obfuscan
