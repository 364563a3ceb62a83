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
#include <optional>
#include <string>

#include "obfuscan/detect_packing.hpp"
#include "obfuscan/detect_renaming.hpp"
#include "obfuscan/detect_stringenc.hpp"

namespace obfuscan {

/// Everything a scan run needs; loadable from a JSON config file and
/// overridable per flag. Referenced paths are checked at load time.
struct ScanConfig {
  std::optional<std::filesystem::path> renaming_model_path;
  std::optional<std::filesystem::path> stringenc_model_path;
  std::optional<std::filesystem::path> libs_path;       // default: bundled list
  std::optional<std::filesystem::path> signature_db_path;  // default: compiled-in db
  OverloadConfig overload;
  CryptoConfig crypto;
  PackingConfig packing;
  unsigned parallelism = 0;  // 0 = logical CPU count
  int top_n = 5;
  std::string source_tag = "unscoped";
};

/// Parses a JSON config document:
///   {
///     "models":   {"renaming": "...", "stringenc": "..."},
///     "libs":     "...", "signatures": "...",
///     "overload": {"composite_threshold": 0.35, "group_size_floor": 10},
///     "crypto":   {"weights": [0.35,0.25,0.15,0.25], "threshold": 0.5},
///     "packing":  {"asset_entropy_min": 7.2, "asset_size_min": 16384,
///                  "wrapper_max_instr": 50},
///     "parallelism": 4, "top_n": 5, "tag": "googleplay"
///   }
/// All keys optional. Relative paths resolve against the config file's
/// directory. Throws Error on parse failure or a referenced path that
/// does not exist.
ScanConfig load_scan_config(const std::filesystem::path& path);
ScanConfig parse_scan_config(const std::string& text, const std::filesystem::path& base_dir);

/// The default third-party library prefixes bundled with the tool; also
/// shipped as data/default_libs.txt.
std::string_view default_library_prefixes_text();

}  // namespace obfuscan
