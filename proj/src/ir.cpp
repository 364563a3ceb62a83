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

#include "obfuscan/ir.hpp"

#include <array>
#include <unordered_set>

#include "obfuscan/errors.hpp"

namespace obfuscan {

namespace {

constexpr std::array<std::string_view, 22> kOpcodeNames = {
    "ConstString", "ConstNumeric", "Move",       "MoveResult",
    "InvokeStatic", "InvokeVirtual", "InvokeDirect", "InvokeInterface",
    "FieldRead",   "FieldWrite",   "StaticRead", "StaticWrite",
    "ArrayOp",     "Branch",       "Goto",       "Return",
    "BitOp",       "ArithOp",      "NewInstance", "NewArray",
    "CheckCast",   "Other",
};

}  // namespace

std::string_view to_string(OpcodeClass c) {
  return kOpcodeNames[static_cast<std::size_t>(c)];
}

std::optional<OpcodeClass> opcode_class_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kOpcodeNames.size(); ++i) {
    if (kOpcodeNames[i] == s) return static_cast<OpcodeClass>(i);
  }
  return std::nullopt;
}

std::string_view MethodDef::return_desc() const {
  const auto close = proto.find(')');
  if (close == std::string::npos || close + 1 >= proto.size()) return {};
  return std::string_view(proto).substr(close + 1);
}

std::string_view ClassDef::simple_name() const {
  const auto dot = name.rfind('.');
  if (dot == std::string::npos) return name;
  return std::string_view(name).substr(dot + 1);
}

void validate_model(const AppModel& app) {
  std::unordered_set<std::string_view> seen;
  for (const auto& cls : app.classes) {
    if (!seen.insert(cls.name).second) {
      throw InvariantError("duplicate class name: " + cls.name);
    }
    for (const auto& m : cls.methods) {
      const auto n = static_cast<std::uint32_t>(m.instructions.size());
      for (const auto& ins : m.instructions) {
        for (std::uint16_t r : ins.operands) {
          if (r >= m.register_count) {
            throw InvariantError("register v" + std::to_string(r) +
                                 " out of range in " + cls.name + "." + m.name);
          }
        }
        switch (ins.op) {
          case OpcodeClass::ConstString:
            if (!ins.string_lit) {
              throw InvariantError("ConstString without string literal in " +
                                   cls.name + "." + m.name);
            }
            break;
          case OpcodeClass::InvokeStatic:
          case OpcodeClass::InvokeVirtual:
          case OpcodeClass::InvokeDirect:
          case OpcodeClass::InvokeInterface:
            if (!ins.method_ref) {
              throw InvariantError("invoke without method ref in " + cls.name +
                                   "." + m.name);
            }
            break;
          case OpcodeClass::Branch:
          case OpcodeClass::Goto:
            if (!ins.branch_target || *ins.branch_target >= n) {
              throw InvariantError("branch target out of range in " + cls.name +
                                   "." + m.name);
            }
            break;
          default:
            break;
        }
      }
    }
  }
}

}  // namespace obfuscan
