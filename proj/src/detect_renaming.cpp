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

#include "obfuscan/detect_renaming.hpp"

#include <zlib.h>

#include <algorithm>
#include <set>
#include <unordered_set>

#include "obfuscan/errors.hpp"
#include "obfuscan/utf8.hpp"

namespace obfuscan {

namespace {

// a, b, ..., z, aa, ab, ..., zz — the default rename sequence of common
// obfuscators, in lexicographic order.
const std::vector<std::string>& rename_sequence() {
  static const std::vector<std::string> seq = [] {
    std::vector<std::string> s;
    for (char c = 'a'; c <= 'z'; ++c) s.push_back(std::string(1, c));
    for (char a = 'a'; a <= 'z'; ++a) {
      for (char b = 'a'; b <= 'z'; ++b) {
        s.push_back(std::string{a, b});
      }
    }
    return s;
  }();
  return seq;
}

constexpr std::size_t kRunLength = 3;

bool is_confusable_name(const std::vector<char32_t>& cps) {
  if (cps.size() < 4) return false;
  for (char32_t c : cps) {
    if (c != 'I' && c != 'l' && c != '1' && c != 'O' && c != '0' && c != 'o') {
      return false;
    }
  }
  return true;
}

std::size_t zlib_length(const std::string& s) {
  uLongf out_len = compressBound(static_cast<uLong>(s.size()));
  std::vector<Bytef> out(out_len);
  const int rc = compress2(out.data(), &out_len,
                           reinterpret_cast<const Bytef*>(s.data()),
                           static_cast<uLong>(s.size()), 9);
  if (rc != Z_OK) throw Error("compressor failure");
  return out_len;
}

int param_count(const std::string& proto) {
  const auto open = proto.find('(');
  const auto close = proto.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open) return 0;
  int n = 0;
  std::size_t i = open + 1;
  while (i < close) {
    while (i < close && proto[i] == '[') ++i;
    if (i >= close) break;
    if (proto[i] == 'L') {
      const auto semi = proto.find(';', i);
      i = (semi == std::string::npos || semi >= close) ? close : semi + 1;
    } else {
      ++i;
    }
    ++n;
  }
  return n;
}

std::set<MethodRef> invoked_refs(const MethodDef& m) {
  std::set<MethodRef> refs;
  for (const auto& ins : m.instructions) {
    if (is_invoke(ins.op) && ins.method_ref) refs.insert(*ins.method_ref);
  }
  return refs;
}

std::set<FieldRef> touched_fields(const MethodDef& m) {
  std::set<FieldRef> refs;
  for (const auto& ins : m.instructions) {
    if (ins.field_ref) refs.insert(*ins.field_ref);
  }
  return refs;
}

template <typename T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;  // two empty footprints are identical
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::vector<std::string> collect_renaming_names(const AppModel& app) {
  std::vector<std::string> names;
  for (const auto& cls : app.classes) {
    if (cls.is_library) continue;
    names.emplace_back(cls.simple_name());
    for (const auto& f : cls.fields) names.push_back(f.name);
    for (const auto& m : cls.methods) {
      if (m.is_constructor) continue;  // compiler-fixed names are noise
      names.push_back(m.name);
    }
  }
  return names;
}

PolicyProfile profile_renaming_policy(const AppModel& app) {
  PolicyProfile p;
  const auto names = collect_renaming_names(app);
  if (names.empty()) return p;

  std::size_t short_names = 0, non_ascii = 0, confusable = 0;
  for (const auto& n : names) {
    const auto cps = utf8_decode(n);
    if (cps.size() <= 2) ++short_names;
    if (std::any_of(cps.begin(), cps.end(), [](char32_t c) { return c > 127; })) {
      ++non_ascii;
    }
    if (is_confusable_name(cps)) ++confusable;
  }
  const double total = static_cast<double>(names.size());
  p.short_name_ratio = static_cast<double>(short_names) / total;
  p.non_ascii_ratio = static_cast<double>(non_ascii) / total;
  p.confusable_ratio = static_cast<double>(confusable) / total;

  // A run of consecutive rename-sequence elements among one class's own
  // members betrays a default obfuscator configuration.
  const auto& seq = rename_sequence();
  for (const auto& cls : app.classes) {
    if (cls.is_library || p.lexicographic_run) break;
    std::unordered_set<std::string_view> members;
    for (const auto& f : cls.fields) members.insert(f.name);
    for (const auto& m : cls.methods) {
      if (!m.is_constructor) members.insert(m.name);
    }
    for (std::size_t i = 0; i + kRunLength <= seq.size(); ++i) {
      bool all = true;
      for (std::size_t k = 0; k < kRunLength; ++k) {
        if (!members.count(seq[i + k])) {
          all = false;
          break;
        }
      }
      if (all) {
        p.lexicographic_run = true;
        break;
      }
    }
  }
  return p;
}

RenamingDetection detect_renaming(const AppModel& app, const LinearModel& model) {
  if (model.charset_id != CharsetId::Identifier) {
    throw ModelCharsetMismatch("renaming detection needs an identifier-charset model");
  }
  RenamingDetection det;
  const auto names = collect_renaming_names(app);
  det.name_count = static_cast<int>(names.size());
  det.policy = profile_renaming_policy(app);
  if (names.empty()) return det;  // nothing to judge

  const auto fv = featurize(names, Charset::identifier());
  const auto pred = predict(model, fv);
  det.score = pred.score;
  det.verdict = pred.positive;
  return det;
}

double function_size_sim(const MethodDef& f1, const MethodDef& f2) {
  const auto n1 = f1.instructions.size();
  const auto n2 = f2.instructions.size();
  if (n1 == 0 || n2 == 0) throw EmptyMethod("function size needs non-empty methods");
  return static_cast<double>(std::min(n1, n2)) / static_cast<double>(std::max(n1, n2));
}

std::string cf_signature(const MethodDef& m) {
  const auto& ins = m.instructions;
  const auto n = static_cast<std::uint32_t>(ins.size());
  if (n == 0) return "";

  std::vector<bool> leader(n, false);
  leader[0] = true;
  for (std::uint32_t pos = 0; pos < n; ++pos) {
    const auto& i = ins[pos];
    const bool flow_break = i.op == OpcodeClass::Branch || i.op == OpcodeClass::Goto ||
                            i.op == OpcodeClass::Return;
    if ((i.op == OpcodeClass::Branch || i.op == OpcodeClass::Goto) && i.branch_target &&
        *i.branch_target < n) {
      leader[*i.branch_target] = true;
    }
    if (flow_break && pos + 1 < n) leader[pos + 1] = true;
  }

  std::string sig;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (leader[i]) {
      if (i > 0) sig += ']';
      sig += "B[";
    }
    switch (ins[i].op) {
      case OpcodeClass::InvokeStatic:
      case OpcodeClass::InvokeVirtual:
      case OpcodeClass::InvokeDirect:
      case OpcodeClass::InvokeInterface:
        sig += 'P';
        sig += static_cast<char>('0' + std::min<std::size_t>(ins[i].operands.size(), 9));
        break;
      case OpcodeClass::FieldWrite:
      case OpcodeClass::StaticWrite:
        sig += "F1";
        break;
      case OpcodeClass::FieldRead:
      case OpcodeClass::StaticRead:
        sig += "F0";
        break;
      case OpcodeClass::Branch:
        sig += 'I';
        break;
      case OpcodeClass::Goto:
        sig += 'G';
        break;
      case OpcodeClass::Return:
        sig += 'R';
        break;
      default:
        break;
    }
  }
  sig += ']';
  return sig;
}

double cfs_distance(const std::string& s1, const std::string& s2) {
  if (s1.empty() || s2.empty()) throw EmptyInput("signature must be non-empty");
  const double c1 = static_cast<double>(zlib_length(s1));
  const double c2 = static_cast<double>(zlib_length(s2));
  // Concatenate in a canonical order; the compressor is not exactly
  // order-independent and the distance must be symmetric.
  const std::string& a = s1 <= s2 ? s1 : s2;
  const std::string& b = s1 <= s2 ? s2 : s1;
  const double c12 = static_cast<double>(zlib_length(a + b));
  const double ncd = (c12 - std::min(c1, c2)) / std::max(c1, c2);
  return std::clamp(ncd, 0.0, 1.0);
}

OverloadReport detect_overloading(const AppModel& app, const OverloadConfig& config) {
  OverloadReport report;
  for (const auto& cls : app.classes) {
    if (cls.is_library) continue;
    std::map<std::string, std::vector<const MethodDef*>> by_name;
    for (const auto& m : cls.methods) by_name[m.name].push_back(&m);

    for (auto& [name, members] : by_name) {
      if (members.size() < 2) continue;

      OverloadGroup group;
      group.class_name = cls.name;
      group.method_name = name;
      group.member_count = static_cast<int>(members.size());
      std::set<int> arities;
      for (const auto* m : members) arities.insert(param_count(m->proto));
      group.arity_variants = static_cast<int>(arities.size());

      std::vector<const MethodDef*> with_code;
      for (const auto* m : members) {
        if (!m->instructions.empty()) with_code.push_back(m);
      }
      double composite_sum = 0.0;
      for (std::size_t i = 0; i < with_code.size(); ++i) {
        for (std::size_t j = i + 1; j < with_code.size(); ++j) {
          PairFeature pf;
          pf.size_sim = function_size_sim(*with_code[i], *with_code[j]);
          pf.invoke_overlap = jaccard(invoked_refs(*with_code[i]), invoked_refs(*with_code[j]));
          pf.var_overlap = jaccard(touched_fields(*with_code[i]), touched_fields(*with_code[j]));
          pf.same_return = with_code[i]->return_desc() == with_code[j]->return_desc() ? 1 : 0;
          pf.cfs_distance = cfs_distance(cf_signature(*with_code[i]), cf_signature(*with_code[j]));
          composite_sum += pf.composite();
          group.pair_scores.push_back(pf);
        }
      }
      if (!group.pair_scores.empty()) {
        const double mean = composite_sum / static_cast<double>(group.pair_scores.size());
        group.suspicious = mean < config.composite_threshold;
      }
      if (members.size() >= config.group_size_floor) group.suspicious = true;
      report.flagged = report.flagged || group.suspicious;
      report.groups.push_back(std::move(group));
    }
  }
  return report;
}

}  // namespace obfuscan
