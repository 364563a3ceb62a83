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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "obfuscan/config.hpp"
#include "obfuscan/detect_packing.hpp"
#include "obfuscan/detect_reflection.hpp"
#include "obfuscan/detect_renaming.hpp"
#include "obfuscan/detect_stringenc.hpp"
#include "obfuscan/ingest.hpp"
#include "obfuscan/linear_model.hpp"

namespace obfuscan {

inline constexpr int kReportSchemaVersion = 1;

struct ReflectionSummary {
  std::vector<ReflectionSite> sites;
  bool uses_reflection = false;  // == sites non-empty
};

/// One app's verdicts. A null technique field means "not run" (missing
/// model, no bytecode, detector failure) as opposed to "negative", so
/// corpus math can exclude it from denominators.
struct ScanReport {
  std::string app_id;
  std::string source_tag;
  std::optional<RenamingDetection> renaming;
  std::optional<OverloadReport> overloading;
  std::optional<StringEncDetection> stringenc;
  std::optional<ReflectionSummary> reflection;
  std::optional<PackingDetection> packing;
  std::map<std::string, std::int64_t> timings_ms;
  std::vector<std::string> warnings;
};

struct Models {
  std::optional<LinearModel> renaming;
  std::optional<LinearModel> stringenc;
};

struct LoadedApp {
  AppModel model;
  std::vector<std::string> warnings;
};

/// Sniffs the input: a document starting with "APP " is textual IR,
/// anything else is treated as an APK container. Library prefixes are
/// applied either way (textual-IR fixtures keep their own LIB marks).
/// Throws CorruptArchive / SyntaxError / InvariantError on unusable
/// input — the caller records the app as skipped.
LoadedApp load_input_bytes(std::span<const std::uint8_t> bytes, const std::string& app_id,
                           const LibraryPrefixList& libs);
LoadedApp load_input_file(const std::filesystem::path& path, const LibraryPrefixList& libs);

/// Runs all four detectors over one loaded app. A detector failure
/// records a warning and leaves that technique null without aborting the
/// others; an archive with no bytecode runs only packing.
ScanReport scan_app(const LoadedApp& app, const Models& models, const ScanConfig& config,
                    const std::vector<PackerSignature>& signature_db);

// --- serialization (canonical JSON, keys sorted, UTF-8) ---

nlohmann::json report_to_json(const ScanReport& report);
std::string report_to_string(const ScanReport& report);
ScanReport report_from_json(const nlohmann::json& j);
ScanReport report_from_string(const std::string& text);

// --- corpus aggregation ---

struct TechniqueCount {
  int positive = 0;
  int evaluated = 0;  // apps where the technique actually ran

  double ratio() const {
    return evaluated == 0 ? 0.0 : static_cast<double>(positive) / evaluated;
  }
  bool operator==(const TechniqueCount&) const = default;
};

struct TagStats {
  int n_apps = 0;
  TechniqueCount renaming;
  TechniqueCount stringenc;
  TechniqueCount reflection;  // positive == app has at least one site
  TechniqueCount packing;
  int reflection_sites = 0;
  int reflection_recovered = 0;
  // Frequency of every recovered target, keyed "owner.name". The top-N
  // cut happens at serialization time so counts stay additive.
  std::map<std::string, int> target_freq;

  bool operator==(const TagStats&) const = default;

  double recovery_ratio() const {
    return reflection_sites == 0
               ? 0.0
               : static_cast<double>(reflection_recovered) / reflection_sites;
  }
};

struct CorpusReport {
  std::map<std::string, TagStats> tags;
  int top_n = 5;
};

/// Folds reports grouped by source_tag, in input order. Null verdicts are
/// excluded from their technique's denominator.
CorpusReport aggregate(const std::vector<ScanReport>& reports, int top_n);

/// Top targets per tag: frequency descending, ties lexicographic, at most
/// top_n entries.
std::vector<std::pair<std::string, int>> top_targets(const TagStats& stats, int top_n);

nlohmann::json corpus_to_json(const CorpusReport& corpus);
std::string corpus_to_string(const CorpusReport& corpus);

}  // namespace obfuscan
