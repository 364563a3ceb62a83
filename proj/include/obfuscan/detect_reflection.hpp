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

#include <optional>
#include <string>
#include <vector>

#include "obfuscan/ir.hpp"
#include "obfuscan/slicer.hpp"

namespace obfuscan {

enum class RecoveryStatus : std::uint8_t { Recovered, PartialInfo, Unrecovered };

std::string_view to_string(RecoveryStatus s);
std::optional<RecoveryStatus> recovery_status_from_string(std::string_view s);

/// One occurrence of the Class.forName -> getMethod -> Method.invoke
/// sequence, with whatever target names backward slicing could recover.
struct ReflectionSite {
  MethodRef container;
  std::uint32_t forname_idx = 0;
  std::uint32_t getmethod_idx = 0;
  std::uint32_t invoke_idx = 0;
  std::optional<std::string> recovered_class;
  std::optional<std::string> recovered_method;
  RecoveryStatus status = RecoveryStatus::Unrecovered;
  std::optional<std::string> partial_info;
  bool via_declared = false;  // matched getDeclaredMethod instead of getMethod

  bool operator==(const ReflectionSite&) const = default;
};

/// Scans every method (libraries included: reflective hiding counts
/// wherever it appears) for the invocation sequence and recovers the
/// class/method name arguments by slicing. Sites are emitted per
/// occurrence in program order; a method containing the sequence twice
/// yields two sites.
std::vector<ReflectionSite> find_reflection_sites(const AppModel& app);

}  // namespace obfuscan
