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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "obfuscan/ir.hpp"

namespace obfuscan {

/// Package-name prefixes identifying third-party library code that the
/// developer did not write. Detectors that classify developer code
/// (renaming, string encryption, overloading) skip marked classes;
/// reflection and packing evidence counts wherever it appears.
struct LibraryPrefixList {
  std::vector<std::string> prefixes;  // non-empty, deduplicated

  bool matches(std::string_view class_name) const;
};

/// Loads a prefix list file: UTF-8 text, one prefix per line, `#`
/// comments, blank lines ignored. Duplicates are dropped.
LibraryPrefixList load_library_prefixes(const std::filesystem::path& path);
LibraryPrefixList parse_library_prefixes(std::string_view text);

struct ApkParseResult {
  AppModel model;
  std::vector<std::string> warnings;

  bool has_warning_containing(std::string_view needle) const;
};

inline constexpr std::string_view kNoDexWarning = "NoDex";

/// Parses an APK (zip) container into an AppModel: one FileEntry per zip
/// entry (path, size, entropy over the first 64 KiB), all classes*.dex
/// entries parsed and merged, library filter applied.
///
/// Throws CorruptArchive when the container itself is unreadable. A valid
/// zip without any classes.dex is NOT an error: packing detection still
/// needs the file inventory, so the result is a zero-class model carrying
/// a NoDex warning. Entry-level problems (unsupported compression, a dex
/// that fails to parse) are also warnings, fatal only to that entry.
ApkParseResult parse_apk(std::span<const std::uint8_t> bytes,
                         const LibraryPrefixList& lib_list,
                         const std::string& app_id);

/// Copy of the model with ClassDef.is_library set iff the class name
/// starts with any prefix (plain string-prefix match). Idempotent.
AppModel mark_libraries(const AppModel& app, const LibraryPrefixList& lib_list);

}  // namespace obfuscan
