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

#include <string>
#include <vector>

#include "obfuscan/ir.hpp"
#include "obfuscan/linear_model.hpp"

namespace obfuscan {

/// Descriptive statistics over an app's collected identifier names,
/// characterizing the renaming policy in use.
struct PolicyProfile {
  double short_name_ratio = 0.0;   // names of at most 2 code points
  bool lexicographic_run = false;  // a,b,c,...,aa,ab progression inside one class
  double non_ascii_ratio = 0.0;    // names containing code points > 127
  double confusable_ratio = 0.0;   // length >= 4 over the {I,l,1,O,0,o} alphabet

  bool operator==(const PolicyProfile&) const = default;
};

struct RenamingDetection {
  bool verdict = false;
  double score = 0.0;
  int name_count = 0;
  PolicyProfile policy;
};

/// Simple class names, method names (constructors excluded) and field
/// names of non-library classes — the multiset the classifier and the
/// policy profiler run on.
std::vector<std::string> collect_renaming_names(const AppModel& app);

PolicyProfile profile_renaming_policy(const AppModel& app);

/// Classifies the app's identifier names with a model trained over the
/// Identifier charset. Apps with zero collected names are negative by
/// definition. Throws ModelCharsetMismatch for a non-Identifier model.
RenamingDetection detect_renaming(const AppModel& app, const LinearModel& model);

// --- excessive overloading ---

struct PairFeature {
  double size_sim = 0.0;       // min/max of instruction counts, in (0,1]
  double invoke_overlap = 0.0; // Jaccard over invoked method refs
  double var_overlap = 0.0;    // Jaccard over touched field refs
  int same_return = 0;         // 1 iff return descriptors match
  double cfs_distance = 0.0;   // compression distance of control-flow signatures

  bool operator==(const PairFeature&) const = default;

  double composite() const {
    return (size_sim + invoke_overlap + var_overlap + same_return + (1.0 - cfs_distance)) / 5.0;
  }
};

struct OverloadGroup {
  std::string class_name;
  std::string method_name;
  int arity_variants = 0;  // distinct parameter counts among the members
  std::vector<PairFeature> pair_scores;
  int member_count = 0;
  bool suspicious = false;
};

struct OverloadReport {
  std::vector<OverloadGroup> groups;
  bool flagged = false;
};

struct OverloadConfig {
  // A group is suspicious when its mean pairwise composite similarity
  // falls below this (the overloads look semantically unrelated).
  double composite_threshold = 0.35;
  // Any same-name group at least this large is flagged outright.
  std::size_t group_size_floor = 10;
};

/// Ratio of the smaller to the larger instruction count of two methods.
/// Throws EmptyMethod when either has no instructions.
double function_size_sim(const MethodDef& f1, const MethodDef& f2);

/// Per-basic-block token string of a method: P<arity> for invokes, F1 for
/// field/static writes, F0 for reads, I for conditional branches, G for
/// gotos, R for returns; every other instruction class is silent.
std::string cf_signature(const MethodDef& m);

/// Normalized compression distance between two signatures under a fixed
/// deflate-class compressor, clamped to [0,1]. Near 0 means similar.
/// Throws EmptyInput when either string is empty.
double cfs_distance(const std::string& s1, const std::string& s2);

OverloadReport detect_overloading(const AppModel& app, const OverloadConfig& config);

}  // namespace obfuscan
