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

#include "obfuscan/slicer.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "obfuscan/utf8.hpp"

namespace obfuscan {

namespace {

struct AbstractValue {
  enum class Kind { Unknown, Str, Opaque } kind = Kind::Unknown;
  std::string text;  // the string for Str, a producer description for Opaque

  static AbstractValue str(std::string s) { return {Kind::Str, std::move(s)}; }
  static AbstractValue opaque(std::string producer) {
    return {Kind::Opaque, std::move(producer)};
  }
  bool is_str() const { return kind == Kind::Str; }
};

std::string ascii_fold(const std::string& s, bool to_lower) {
  auto cps = utf8_decode(s);
  for (auto& cp : cps) {
    if (to_lower && cp >= 'A' && cp <= 'Z') cp += 32;
    if (!to_lower && cp >= 'a' && cp <= 'z') cp -= 32;
  }
  return utf8_encode(cps);
}

// Java String.trim: strips leading/trailing chars <= U+0020.
std::string java_trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && static_cast<unsigned char>(s[b]) <= 0x20) ++b;
  while (e > b && static_cast<unsigned char>(s[e - 1]) <= 0x20) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::string method_ref_string(const MethodRef& ref) {
  return ref.owner_class + "->" + ref.name + ":" + ref.proto;
}

std::optional<std::uint16_t> defined_register(const Instr& ins) {
  switch (ins.op) {
    case OpcodeClass::ConstString:
    case OpcodeClass::ConstNumeric:
    case OpcodeClass::Move:
    case OpcodeClass::MoveResult:
    case OpcodeClass::FieldRead:
    case OpcodeClass::StaticRead:
    case OpcodeClass::BitOp:
    case OpcodeClass::ArithOp:
    case OpcodeClass::NewInstance:
    case OpcodeClass::NewArray:
    case OpcodeClass::CheckCast:
    case OpcodeClass::ArrayOp:
    case OpcodeClass::Other:
      if (!ins.operands.empty()) return ins.operands.front();
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

SliceState backward_slice(const MethodDef& m, std::uint32_t use_idx, std::uint16_t reg) {
  SliceState state;
  state.criterion_register = reg;
  state.use_idx = use_idx;
  if (use_idx > m.instructions.size()) return state;

  // Every branch target in the method, for deciding whether a def can be
  // bypassed: if some jump lands strictly after a def but at or before
  // the use that consumes it, an alternative def may reach that use too.
  std::set<std::uint32_t> jump_targets;
  for (const auto& ins : m.instructions) {
    if (ins.branch_target) jump_targets.insert(*ins.branch_target);
  }
  auto bypassable = [&](std::uint32_t def_idx, std::uint32_t at) {
    const auto it = jump_targets.upper_bound(def_idx);
    return it != jump_targets.end() && *it <= at;
  };

  // reg -> position of the use that put it under tracking.
  std::map<std::uint16_t, std::uint32_t> tracked{{reg, use_idx}};
  std::set<std::uint32_t> collected;

  auto track = [&](std::uint16_t r, std::uint32_t at) {
    auto [it, inserted] = tracked.emplace(r, at);
    if (!inserted && it->second < at) it->second = at;  // widen the window
  };

  std::set<std::uint32_t> reaching;
  for (std::uint32_t i = use_idx; i-- > 0;) {
    const Instr& ins = m.instructions[i];
    // A constructor call initializes its receiver, so it acts as a def of
    // that register (this is how StringBuilder values come to life).
    if (is_invoke(ins.op) && ins.method_ref && ins.method_ref->name == "<init>" &&
        !ins.operands.empty()) {
      const auto recv = tracked.find(ins.operands[0]);
      if (recv != tracked.end()) {
        collected.insert(i);
        if (ins.operands[0] == reg && recv->second == use_idx) reaching.insert(i);
        if (!bypassable(i, recv->second)) tracked.erase(recv);
        for (std::size_t k = 1; k < ins.operands.size(); ++k) track(ins.operands[k], i);
      }
      continue;
    }
    const auto def = defined_register(ins);
    if (!def) continue;
    const auto it = tracked.find(*def);
    if (it == tracked.end()) continue;
    collected.insert(i);
    if (*def == reg && it->second == use_idx) reaching.insert(i);
    // A def with no jump landing between it and its use dominates the use
    // on the linear list: earlier defs of the register are dead here.
    if (!bypassable(i, it->second)) tracked.erase(it);
    switch (ins.op) {
      case OpcodeClass::Move:
        if (ins.operands.size() >= 2) track(ins.operands[1], i);
        break;
      case OpcodeClass::MoveResult:
        // The value comes from the invoke immediately before.
        if (i > 0 && is_invoke(m.instructions[i - 1].op)) {
          collected.insert(i - 1);
          for (std::uint16_t r : m.instructions[i - 1].operands) track(r, i - 1);
        }
        break;
      default:
        break;
    }
  }

  state.slice.assign(collected.begin(), collected.end());
  state.reaching_defs.assign(reaching.begin(), reaching.end());
  return state;
}

SliceState simulate_slice(const MethodDef& m, SliceState s) {
  std::map<std::uint16_t, AbstractValue> env;
  std::vector<AbstractValue> criterion_defs;
  const std::set<std::uint32_t> reaching(s.reaching_defs.begin(), s.reaching_defs.end());
  std::uint32_t current_idx = 0;
  AbstractValue pending;  // result of the most recent simulated invoke
  std::uint32_t pending_idx = 0;
  bool have_pending = false;

  auto value_of = [&](std::uint16_t r) -> AbstractValue {
    const auto it = env.find(r);
    return it == env.end() ? AbstractValue{} : it->second;
  };

  // Only assignments at reaching-def sites count toward resolution;
  // intermediate writes (e.g. a register later overwritten) do not.
  auto assign = [&](std::uint16_t r, AbstractValue v) {
    if (r == s.criterion_register && reaching.count(current_idx)) {
      criterion_defs.push_back(v);
    }
    env[r] = std::move(v);
  };

  for (const std::uint32_t idx : s.slice) {
    if (idx >= m.instructions.size()) continue;
    current_idx = idx;
    const Instr& ins = m.instructions[idx];
    switch (ins.op) {
      case OpcodeClass::ConstString:
        if (!ins.operands.empty() && ins.string_lit) {
          assign(ins.operands[0], AbstractValue::str(*ins.string_lit));
        }
        break;
      case OpcodeClass::Move:
        if (ins.operands.size() >= 2) assign(ins.operands[0], value_of(ins.operands[1]));
        break;
      case OpcodeClass::MoveResult:
        if (!ins.operands.empty()) {
          if (have_pending && pending_idx + 1 == idx) {
            assign(ins.operands[0], pending);
          } else {
            assign(ins.operands[0], AbstractValue{});
          }
        }
        break;
      case OpcodeClass::InvokeStatic:
      case OpcodeClass::InvokeVirtual:
      case OpcodeClass::InvokeDirect:
      case OpcodeClass::InvokeInterface: {
        if (!ins.method_ref) break;
        const MethodRef& ref = *ins.method_ref;
        const auto& regs = ins.operands;
        AbstractValue result = AbstractValue::opaque(method_ref_string(ref));

        auto arg = [&](std::size_t k) -> AbstractValue {
          return k < regs.size() ? value_of(regs[k]) : AbstractValue{};
        };

        if (ref.owner_class == "java.lang.String") {
          if (ref.name == "concat" && regs.size() >= 2) {
            const auto a = arg(0), b = arg(1);
            if (a.is_str() && b.is_str()) result = AbstractValue::str(a.text + b.text);
          } else if (ref.name == "valueOf" && ref.proto.starts_with("(Ljava/lang/String;)") &&
                     regs.size() >= 1) {
            const auto a = arg(0);
            if (a.is_str()) result = a;
          } else if (ref.name == "trim" && regs.size() >= 1) {
            const auto a = arg(0);
            if (a.is_str()) result = AbstractValue::str(java_trim(a.text));
          } else if ((ref.name == "toLowerCase" || ref.name == "toUpperCase") &&
                     regs.size() >= 1 && ref.proto.starts_with("()")) {
            const auto a = arg(0);
            if (a.is_str()) {
              result = AbstractValue::str(ascii_fold(a.text, ref.name == "toLowerCase"));
            }
          }
        } else if (ref.owner_class == "java.lang.StringBuilder") {
          if (ref.name == "<init>" && !regs.empty()) {
            if (regs.size() == 1) {
              assign(regs[0], AbstractValue::str(""));
            } else if (ref.proto.starts_with("(Ljava/lang/String;)")) {
              assign(regs[0], arg(1));
            } else {
              assign(regs[0], AbstractValue::opaque(method_ref_string(ref)));
            }
            break;  // constructors produce no result value
          }
          if (ref.name == "append" && regs.size() >= 2 &&
              ref.proto.starts_with("(Ljava/lang/String;)")) {
            const auto sb = arg(0), piece = arg(1);
            if (sb.is_str() && piece.is_str()) {
              result = AbstractValue::str(sb.text + piece.text);
              assign(regs[0], result);  // append mutates and returns the builder
            }
          } else if (ref.name == "toString" && !regs.empty()) {
            const auto sb = arg(0);
            if (sb.is_str()) result = sb;
          }
        }

        pending = std::move(result);
        pending_idx = idx;
        have_pending = true;
        break;
      }
      default: {
        // Field reads, array ops etc. produce values this interpreter
        // does not model.
        const auto def = defined_register(ins);
        if (def) {
          std::string producer(to_string(ins.op));
          if (ins.field_ref) {
            producer = ins.field_ref->owner_class + "->" + ins.field_ref->name;
          }
          assign(*def, AbstractValue::opaque(std::move(producer)));
        }
        break;
      }
    }
  }

  bool all_same_string = !criterion_defs.empty();
  for (const auto& v : criterion_defs) {
    if (!v.is_str() || v.text != criterion_defs.front().text) {
      all_same_string = false;
      break;
    }
  }
  if (all_same_string) {
    s.resolved_value = criterion_defs.front().text;
  } else {
    for (const auto& v : criterion_defs) {
      if (v.kind == AbstractValue::Kind::Opaque) {
        s.partial_info = v.text;
        break;
      }
    }
    if (!s.partial_info && criterion_defs.size() > 1) {
      s.partial_info = "conflicting definitions reach the use site";
    }
  }
  return s;
}

SliceState slice_and_resolve(const MethodDef& m, std::uint32_t use_idx, std::uint16_t reg) {
  return simulate_slice(m, backward_slice(m, use_idx, reg));
}

}  // namespace obfuscan
