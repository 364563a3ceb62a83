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
#include <map>
#include <string>
#include <vector>

#include "obfuscan/ngram.hpp"

namespace obfuscan {

struct TrainingMeta {
  std::uint64_t seed = 42;
  std::uint32_t epochs = 50;
  double lambda = 1e-4;
  std::uint32_t sample_count = 0;

  bool operator==(const TrainingMeta&) const = default;
};

/// Linear max-margin classifier over 3-gram frequency vectors.
struct LinearModel {
  CharsetId charset_id = CharsetId::Identifier;
  std::map<std::string, double> weights;
  double bias = 0.0;
  std::string label_positive;
  TrainingMeta meta;

  bool operator==(const LinearModel&) const = default;
};

struct Hyper {
  double lambda = 1e-4;
  std::uint32_t epochs = 50;
  std::uint64_t seed = 42;
};

struct Sample {
  FeatureVector vec;
  std::string label;
};

/// Deterministic subgradient descent on the L2-regularized hinge loss.
/// The seed governs per-epoch shuffling (hand-rolled Fisher-Yates, so the
/// visit order does not depend on the standard library implementation).
/// The final intercept comes from a minimum-error maximum-margin line
/// search over the training scores, which keeps inputs with few known
/// grams on the correct side. Throws MixedCharsets when sample charsets
/// disagree and SingleClass when fewer than two labels are present.
LinearModel train(const std::vector<Sample>& samples, const Hyper& hyper,
                  const std::string& label_positive);

struct Prediction {
  std::string label;
  double score = 0.0;
  bool positive = false;
};

/// score = dot(weights, v) + bias; positive iff score > 0. A tie at
/// exactly zero resolves to negative. Throws MixedCharsets on charset
/// mismatch between model and vector.
Prediction predict(const LinearModel& model, const FeatureVector& v);

double dot(const LinearModel& model, const FeatureVector& v);

/// Canonical JSON serialization with a versioned header; doubles use the
/// shortest round-trippable representation, so save/load is exact.
void save_model(const LinearModel& model, const std::filesystem::path& path);
std::string model_to_json(const LinearModel& model);
LinearModel load_model(const std::filesystem::path& path);
LinearModel model_from_json(const std::string& text);

}  // namespace obfuscan
