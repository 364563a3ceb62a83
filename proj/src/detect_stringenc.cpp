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

#include "obfuscan/detect_stringenc.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "obfuscan/errors.hpp"
#include "obfuscan/slicer.hpp"

namespace obfuscan {

namespace {

double saturate(int n) { return static_cast<double>(n) / (static_cast<double>(n) + 1.0); }

bool is_jce_owner(const std::string& owner) {
  return owner.starts_with("javax.crypto.") || owner.starts_with("java.security.");
}

bool is_string_op_owner(const std::string& owner) {
  return owner == "java.lang.String" || owner == "java.lang.StringBuilder" ||
         owner == "java.lang.Character";
}

}  // namespace

std::vector<std::string> collect_app_strings(const AppModel& app) {
  std::vector<std::string> strings;
  for (const auto& cls : app.classes) {
    if (cls.is_library) continue;
    for (const auto& m : cls.methods) {
      for (const auto& ins : m.instructions) {
        if (ins.op == OpcodeClass::ConstString && ins.string_lit) {
          strings.push_back(*ins.string_lit);
        }
      }
    }
  }
  return strings;
}

StringEncDetection detect_string_encryption(const AppModel& app, const LinearModel& model) {
  if (model.charset_id != CharsetId::Ascii) {
    throw ModelCharsetMismatch("string-encryption detection needs an ascii-charset model");
  }
  StringEncDetection det;
  const auto strings = collect_app_strings(app);
  det.string_count = static_cast<int>(strings.size());
  if (strings.empty()) return det;

  const auto fv = featurize(strings, Charset::ascii());
  const auto pred = predict(model, fv);
  det.score = pred.score;
  det.verdict = pred.positive;
  return det;
}

bool classify_string_encrypted(const std::string& s, const LinearModel& model) {
  const auto fv = featurize({s}, Charset::ascii());
  if (fv.counts.empty()) return false;  // too short to judge
  return predict(model, fv).positive;
}

std::vector<CryptoFnReport> analyze_crypto_functions(const AppModel& app,
                                                     const CryptoConfig& config,
                                                     const LinearModel* model) {
  struct Stats {
    double bitloop = 0.0;
    int jce = 0;
    int strop = 0;
    int enc_param = 0;
  };
  std::map<MethodRef, Stats> per_method;

  for (const auto& cls : app.classes) {
    if (cls.is_library) continue;
    for (const auto& m : cls.methods) {
      if (m.instructions.empty()) continue;
      Stats st;
      int bit_or_backward = 0;
      for (const auto& ins : m.instructions) {
        if (ins.op == OpcodeClass::BitOp) ++bit_or_backward;
        if ((ins.op == OpcodeClass::Branch || ins.op == OpcodeClass::Goto) &&
            ins.branch_target && *ins.branch_target <= ins.index) {
          ++bit_or_backward;  // backward edge, the loop proxy
        }
        if (is_invoke(ins.op) && ins.method_ref) {
          if (is_jce_owner(ins.method_ref->owner_class)) ++st.jce;
          if (is_string_op_owner(ins.method_ref->owner_class)) ++st.strop;
        }
      }
      st.bitloop = static_cast<double>(bit_or_backward) /
                   static_cast<double>(m.instructions.size());
      per_method.emplace(MethodRef{cls.name, m.name, m.proto}, st);
    }
  }

  // Count call sites anywhere in the app that pass a string constant the
  // per-string classifier labels encrypted into one of these methods.
  if (model) {
    std::unordered_map<std::string, bool> verdict_cache;
    auto encrypted = [&](const std::string& s) {
      const auto it = verdict_cache.find(s);
      if (it != verdict_cache.end()) return it->second;
      const bool v = classify_string_encrypted(s, *model);
      verdict_cache.emplace(s, v);
      return v;
    };

    for (const auto& cls : app.classes) {
      for (const auto& m : cls.methods) {
        for (const auto& ins : m.instructions) {
          if (!is_invoke(ins.op) || !ins.method_ref) continue;
          const auto target = per_method.find(*ins.method_ref);
          if (target == per_method.end()) continue;
          // Skip the receiver of instance invokes; it cannot be a string
          // argument being handed in.
          const std::size_t first_arg = ins.op == OpcodeClass::InvokeStatic ? 0 : 1;
          for (std::size_t k = first_arg; k < ins.operands.size(); ++k) {
            const auto resolved = slice_and_resolve(m, ins.index, ins.operands[k]);
            if (resolved.resolved_value && encrypted(*resolved.resolved_value)) {
              ++target->second.enc_param;
              break;  // one hit per call site
            }
          }
        }
      }
    }
  }

  std::vector<CryptoFnReport> out;
  for (const auto& [ref, st] : per_method) {
    CryptoFnReport r;
    r.method = ref;
    r.bitloop_ratio = st.bitloop;
    r.jce_calls = st.jce;
    r.strop_count = st.strop;
    r.enc_param_freq = st.enc_param;
    r.score = config.weight_bitloop * st.bitloop + config.weight_jce * saturate(st.jce) +
              config.weight_strop * saturate(st.strop) +
              config.weight_enc_param * saturate(st.enc_param);
    if (r.score >= config.threshold) out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const CryptoFnReport& a, const CryptoFnReport& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.method < b.method;
  });
  return out;
}

}  // namespace obfuscan
