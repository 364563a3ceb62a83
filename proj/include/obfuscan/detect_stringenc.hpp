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

/// One candidate cryptographic (decrypt) function with its evidence.
struct CryptoFnReport {
  MethodRef method;
  double bitloop_ratio = 0.0;  // (bit ops + backward branches) / instructions
  int jce_calls = 0;           // javax.crypto.* / java.security.* invokes
  int strop_count = 0;         // String/StringBuilder/Character invokes
  int enc_param_freq = 0;      // call sites passing an encrypted constant in
  double score = 0.0;
};

struct StringEncDetection {
  bool verdict = false;
  double score = 0.0;
  int string_count = 0;
  std::vector<CryptoFnReport> crypto_candidates;
};

struct CryptoConfig {
  // Weighted sum over [bitloop_ratio, jce, strop, enc_param]; the three
  // counts saturate via n/(n+1) before weighting.
  double weight_bitloop = 0.35;
  double weight_jce = 0.25;
  double weight_strop = 0.15;
  double weight_enc_param = 0.25;
  double threshold = 0.5;
};

/// Every ConstString literal in non-library methods, in code order.
std::vector<std::string> collect_app_strings(const AppModel& app);

/// App-level verdict from the Ascii-charset model over all collected
/// string literals. Zero strings means a negative verdict. Throws
/// ModelCharsetMismatch for a non-Ascii model.
StringEncDetection detect_string_encryption(const AppModel& app, const LinearModel& model);

/// Scores every non-library method on the four features and returns the
/// candidates at or above the threshold, ordered by score descending and
/// then method ref ascending. The model classifies individual string
/// arguments for enc_param_freq; pass nullptr to skip that feature.
std::vector<CryptoFnReport> analyze_crypto_functions(const AppModel& app,
                                                     const CryptoConfig& config,
                                                     const LinearModel* model);

/// Per-string verdict used for enc_param_freq; exposed for tests.
bool classify_string_encrypted(const std::string& s, const LinearModel& model);

}  // namespace obfuscan
