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

#include "obfuscan/detect_reflection.hpp"

namespace obfuscan {

namespace {

bool is_forname(const Instr& ins) {
  return ins.op == OpcodeClass::InvokeStatic && ins.method_ref &&
         ins.method_ref->owner_class == "java.lang.Class" &&
         ins.method_ref->name == "forName";
}

enum class GetMethodKind { No, Plain, Declared };

GetMethodKind get_method_kind(const Instr& ins) {
  if (!is_invoke(ins.op) || !ins.method_ref) return GetMethodKind::No;
  if (ins.method_ref->owner_class != "java.lang.Class") return GetMethodKind::No;
  if (ins.method_ref->name == "getMethod") return GetMethodKind::Plain;
  if (ins.method_ref->name == "getDeclaredMethod") return GetMethodKind::Declared;
  return GetMethodKind::No;
}

bool is_method_invoke(const Instr& ins) {
  return is_invoke(ins.op) && ins.method_ref &&
         ins.method_ref->owner_class == "java.lang.reflect.Method" &&
         ins.method_ref->name == "invoke";
}

// Recovers one name argument; merges the slice outcome into the site.
std::optional<std::string> recover_argument(const MethodDef& m, std::uint32_t call_idx,
                                            std::size_t arg_pos, ReflectionSite& site) {
  const Instr& call = m.instructions[call_idx];
  if (arg_pos >= call.operands.size()) return std::nullopt;
  const auto resolved = slice_and_resolve(m, call_idx, call.operands[arg_pos]);
  if (resolved.resolved_value) return resolved.resolved_value;
  if (resolved.partial_info && !site.partial_info) {
    site.partial_info = resolved.partial_info;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::Recovered:
      return "Recovered";
    case RecoveryStatus::PartialInfo:
      return "PartialInfo";
    case RecoveryStatus::Unrecovered:
      return "Unrecovered";
  }
  return "Unrecovered";
}

std::optional<RecoveryStatus> recovery_status_from_string(std::string_view s) {
  if (s == "Recovered") return RecoveryStatus::Recovered;
  if (s == "PartialInfo") return RecoveryStatus::PartialInfo;
  if (s == "Unrecovered") return RecoveryStatus::Unrecovered;
  return std::nullopt;
}

std::vector<ReflectionSite> find_reflection_sites(const AppModel& app) {
  std::vector<ReflectionSite> sites;
  for (const auto& cls : app.classes) {
    for (const auto& m : cls.methods) {
      std::optional<std::uint32_t> pending_forname;
      std::optional<std::uint32_t> pending_getmethod;
      bool pending_declared = false;

      for (std::uint32_t i = 0; i < m.instructions.size(); ++i) {
        const Instr& ins = m.instructions[i];
        if (is_forname(ins)) {
          if (!pending_forname) pending_forname = i;
          continue;
        }
        const auto gm = get_method_kind(ins);
        if (gm != GetMethodKind::No) {
          if (pending_forname && !pending_getmethod) {
            pending_getmethod = i;
            pending_declared = (gm == GetMethodKind::Declared);
          }
          continue;
        }
        if (is_method_invoke(ins) && pending_forname && pending_getmethod) {
          ReflectionSite site;
          site.container = MethodRef{cls.name, m.name, m.proto};
          site.forname_idx = *pending_forname;
          site.getmethod_idx = *pending_getmethod;
          site.invoke_idx = i;
          site.via_declared = pending_declared;

          // forName(String): the lone argument. getMethod(String, Class[]):
          // operand 0 is the Class receiver, operand 1 the name.
          site.recovered_class = recover_argument(m, site.forname_idx, 0, site);
          const std::size_t name_pos =
              m.instructions[site.getmethod_idx].op == OpcodeClass::InvokeStatic ? 0 : 1;
          site.recovered_method = recover_argument(m, site.getmethod_idx, name_pos, site);

          if (site.recovered_class && site.recovered_method) {
            site.status = RecoveryStatus::Recovered;
          } else if (site.partial_info) {
            site.status = RecoveryStatus::PartialInfo;
          } else {
            site.status = RecoveryStatus::Unrecovered;
          }
          sites.push_back(std::move(site));
          pending_forname.reset();
          pending_getmethod.reset();
          pending_declared = false;
        }
      }
    }
  }
  return sites;
}

}  // namespace obfuscan
