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
#include <optional>
#include <string>
#include <vector>

#include "obfuscan/ir.hpp"

namespace obfuscan {

struct SliceState {
  std::uint16_t criterion_register = 0;
  std::uint32_t use_idx = 0;
  std::vector<std::uint32_t> slice;  // strictly ascending, all < use_idx
  // Subset of the slice: the defs of the criterion register that can
  // reach the use site. Resolution requires them all to agree.
  std::vector<std::uint32_t> reaching_defs;
  std::optional<std::string> resolved_value;
  // Set when the value could not be resolved but a producer is known,
  // e.g. the argument is the return value of some app function.
  std::optional<std::string> partial_info;
};

/// Walks backward from use_idx-1 collecting the def-use closure of reg
/// over the linear instruction list. Move chains are followed; a
/// MoveResult pulls in its immediately preceding invoke (and that
/// invoke's argument registers). Branches are not modeled: every def of a
/// tracked register found on the walk joins the slice, and disagreement
/// between reaching defs is resolved later by simulate_slice.
SliceState backward_slice(const MethodDef& m, std::uint32_t use_idx, std::uint16_t reg);

/// Abstract interpretation over the slice. Supported producers:
/// ConstString, Move/MoveResult propagation, and invokes of
/// String.concat, StringBuilder.append/toString (plus its constructors),
/// String.valueOf(String), String.trim, String.toLowerCase/toUpperCase
/// (locale-free, ASCII code-point folding) with all-constant inputs.
/// No inter-procedural resolution is performed: any other producing
/// instruction yields no resolved value and is recorded as partial_info.
/// When several defs of the criterion register reach the use site the
/// value resolves only if all of them simulate to the same string.
SliceState simulate_slice(const MethodDef& m, SliceState s);

/// backward_slice followed by simulate_slice.
SliceState slice_and_resolve(const MethodDef& m, std::uint32_t use_idx, std::uint16_t reg);

/// The register an instruction writes, when the class-level IR can tell.
/// Conservative: opcode classes whose first operand may be a destination
/// (ArrayOp, Other) are treated as defining it.
std::optional<std::uint16_t> defined_register(const Instr& ins);

std::string method_ref_string(const MethodRef& ref);

}  // namespace obfuscan
