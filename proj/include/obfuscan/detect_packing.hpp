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
#include <filesystem>
#include <string>
#include <vector>

#include "obfuscan/ir.hpp"

namespace obfuscan {

/// Fingerprint of one packing service: file paths it injects into the
/// APK and classes its wrapper code declares. Signatures change as the
/// services update, hence the external, editable database file.
struct PackerSignature {
  std::string packer_name;
  std::vector<std::string> file_signatures;  // exact path or "*/"-prefixed suffix
  std::vector<std::string> code_signatures;  // class-name prefixes
};

struct PackerMatch {
  std::string packer_name;
  std::vector<std::string> evidence;  // "file:<pattern>" / "code:<prefix>"

  bool operator==(const PackerMatch&) const = default;
};

struct PackingHeuristics {
  bool derived_application = false;
  bool encrypted_asset = false;
  bool thin_wrapper = false;

  int count() const {
    return (derived_application ? 1 : 0) + (encrypted_asset ? 1 : 0) + (thin_wrapper ? 1 : 0);
  }
};

struct PackingDetection {
  std::vector<PackerMatch> matched_packers;
  PackingHeuristics heuristic_flags;
  // verdict == matched_packers non-empty OR at least two heuristics firing
  bool verdict = false;
};

struct PackingConfig {
  double asset_entropy_min = 7.2;
  std::uint64_t asset_size_min = 16 * 1024;
  std::uint32_t wrapper_max_instr = 50;
};

/// Database text format, one packer per record:
///   PACKER <name>
///   FILE <pattern>
///   CODE <prefix>
/// `#` comments and blank lines are ignored. Throws BadSignatureDb on a
/// record without signatures, a duplicate packer name, or stray lines.
std::vector<PackerSignature> parse_signature_db(std::string_view text);
std::vector<PackerSignature> load_signature_db(const std::filesystem::path& path);

/// The compiled-in copy of the default database (six packing services);
/// the same content ships as data/packers.sig.
std::string_view default_signature_db_text();

/// True when `path` equals the pattern, or the pattern starts with "*/"
/// and `path` ends with the remainder at a path-segment boundary.
bool file_signature_matches(std::string_view pattern, std::string_view path);

PackingDetection detect_packing(const AppModel& app,
                                const std::vector<PackerSignature>& db,
                                const PackingConfig& config);

}  // namespace obfuscan
