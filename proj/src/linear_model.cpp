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

#include "obfuscan/linear_model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "obfuscan/errors.hpp"

namespace obfuscan {

namespace {

constexpr int kModelVersion = 1;
constexpr const char* kModelFormat = "obfuscan-linear-model";

void fisher_yates(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

// The SGD loop learns a good direction but leaves the intercept wherever
// the last updates happened to put it, which matters for inputs with few
// or no known grams. Re-derive it by a line search over the training
// scores: the threshold with the fewest misclassifications, preferring
// the middle of the widest separating gap.
double calibrate_bias(const std::vector<double>& dots, const std::vector<double>& labels) {
  std::vector<std::pair<double, double>> by_dot(dots.size());
  for (std::size_t i = 0; i < dots.size(); ++i) by_dot[i] = {dots[i], labels[i]};
  std::sort(by_dot.begin(), by_dot.end());

  const std::size_t n = by_dot.size();
  std::size_t positives_total = 0;
  for (const auto& [d, y] : by_dot) positives_total += (y > 0) ? 1u : 0u;
  const std::size_t negatives_total = n - positives_total;

  // Candidate thresholds sit between consecutive distinct scores (and
  // beyond both ends); label is positive iff dot > t, so
  // errors(t) = #positives at or below t + #negatives above t.
  struct Candidate {
    double threshold = 0.0;
    double gap = 0.0;
    std::size_t errors = 0;
  };
  std::optional<Candidate> best;
  auto consider = [&](double threshold, double gap, std::size_t errors) {
    if (!best || errors < best->errors || (errors == best->errors && gap > best->gap)) {
      best = Candidate{threshold, gap, errors};
    }
  };

  const double span = by_dot.back().first - by_dot.front().first;
  const double pad = span > 0 ? span * 0.5 : 1.0;
  consider(by_dot.front().first - pad, 0.0, negatives_total);

  std::size_t pos_below = 0, neg_below = 0;
  for (std::size_t i = 0; i < n; ++i) {
    (by_dot[i].second > 0 ? pos_below : neg_below) += 1;
    const double here = by_dot[i].first;
    const double next = (i + 1 < n) ? by_dot[i + 1].first : here + 2 * pad;
    if (next <= here) continue;  // equal scores carry no boundary
    const std::size_t errors = pos_below + (negatives_total - neg_below);
    consider((here + next) / 2.0, i + 1 < n ? next - here : 0.0, errors);
  }
  return -best->threshold;
}

}  // namespace

double dot(const LinearModel& model, const FeatureVector& v) {
  double s = 0.0;
  for (const auto& [gram, value] : v.counts) {
    const auto it = model.weights.find(gram);
    if (it != model.weights.end()) s += it->second * value;
  }
  return s;
}

LinearModel train(const std::vector<Sample>& samples, const Hyper& hyper,
                  const std::string& label_positive) {
  if (samples.empty()) throw SingleClass("no training samples");
  const CharsetId cs = samples.front().vec.charset_id;
  bool any_pos = false, any_neg = false;
  for (const auto& s : samples) {
    if (s.vec.charset_id != cs) {
      throw MixedCharsets("training vectors use different charsets");
    }
    (s.label == label_positive ? any_pos : any_neg) = true;
  }
  if (!any_pos || !any_neg) {
    throw SingleClass("need at least one sample of each label");
  }

  // Pegasos-style updates with the usual lazy-scaling trick: w = scale * u.
  std::map<std::string, double> u;
  double scale = 1.0;
  double bias = 0.0;
  const double eta0 = 1.0;

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(hyper.seed);

  std::size_t t = 0;
  for (std::uint32_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    fisher_yates(order, rng);
    for (const std::size_t i : order) {
      ++t;
      const double eta = eta0 / (1.0 + eta0 * hyper.lambda * static_cast<double>(t));
      const auto& s = samples[i];
      const double y = (s.label == label_positive) ? 1.0 : -1.0;
      double wx = 0.0;
      for (const auto& [gram, value] : s.vec.counts) {
        const auto it = u.find(gram);
        if (it != u.end()) wx += it->second * value;
      }
      wx *= scale;
      const double margin = y * (wx + bias);
      scale *= (1.0 - eta * hyper.lambda);
      if (scale < 1e-9) {
        // Fold the scale back in before it degenerates.
        for (auto& [gram, w] : u) w *= scale;
        scale = 1.0;
      }
      if (margin < 1.0) {
        for (const auto& [gram, value] : s.vec.counts) {
          u[gram] += eta * y * value / scale;
        }
        bias += eta * y;  // bias is not regularized
      }
    }
  }

  LinearModel model;
  model.charset_id = cs;
  model.label_positive = label_positive;
  model.meta = TrainingMeta{hyper.seed, hyper.epochs, hyper.lambda,
                            static_cast<std::uint32_t>(samples.size())};
  for (auto& [gram, w] : u) {
    const double wv = w * scale;
    if (wv != 0.0) model.weights.emplace(gram, wv);
  }

  // Fix the intercept along the learned direction (see calibrate_bias);
  // the SGD value of `bias` only steered the direction search.
  std::vector<double> dots_final(samples.size()), ys(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dots_final[i] = dot(model, samples[i].vec);
    ys[i] = (samples[i].label == label_positive) ? 1.0 : -1.0;
  }
  model.bias = calibrate_bias(dots_final, ys);
  return model;
}

Prediction predict(const LinearModel& model, const FeatureVector& v) {
  if (v.charset_id != model.charset_id) {
    throw MixedCharsets("feature vector charset does not match model");
  }
  Prediction p;
  p.score = dot(model, v) + model.bias;
  p.positive = p.score > 0.0;
  p.label = p.positive ? model.label_positive : "not-" + model.label_positive;
  return p;
}

std::string model_to_json(const LinearModel& model) {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["charset"] = std::string(to_string(model.charset_id));
  j["bias"] = model.bias;
  j["label_positive"] = model.label_positive;
  j["weights"] = model.weights;
  j["training_meta"] = {
      {"seed", model.meta.seed},
      {"epochs", model.meta.epochs},
      {"lambda", model.meta.lambda},
      {"sample_count", model.meta.sample_count},
  };
  return j.dump(2) + "\n";
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BadModelFile("cannot open for writing: " + path.string());
  out << model_to_json(model);
}

LinearModel model_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw BadModelFile("not a model file");
  if (j.value("format", "") != kModelFormat) throw BadModelFile("bad format marker");
  if (j.value("version", -1) != kModelVersion) {
    throw BadModelFile("unsupported model version");
  }
  LinearModel m;
  const auto cs = j.value("charset", "");
  if (cs == "identifier") {
    m.charset_id = CharsetId::Identifier;
  } else if (cs == "ascii") {
    m.charset_id = CharsetId::Ascii;
  } else {
    throw BadModelFile("unknown charset: " + cs);
  }
  try {
    m.bias = j.at("bias").get<double>();
    m.label_positive = j.at("label_positive").get<std::string>();
    m.weights = j.at("weights").get<std::map<std::string, double>>();
    const auto& tm = j.at("training_meta");
    m.meta.seed = tm.at("seed").get<std::uint64_t>();
    m.meta.epochs = tm.at("epochs").get<std::uint32_t>();
    m.meta.lambda = tm.at("lambda").get<double>();
    m.meta.sample_count = tm.at("sample_count").get<std::uint32_t>();
  } catch (const nlohmann::json::exception& e) {
    throw BadModelFile(std::string("malformed model: ") + e.what());
  }
  for (const auto& [gram, w] : m.weights) {
    if (!std::isfinite(w)) throw BadModelFile("non-finite weight");
  }
  if (!std::isfinite(m.bias)) throw BadModelFile("non-finite bias");
  return m;
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadModelFile("cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace obfuscan
