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
#include <string_view>

#include "obfuscan/ir.hpp"

namespace obfuscan {

// Line-oriented UTF-8 fixture format:
//
//   APP <app_id>
//   FILE <size> entropy=<real> <path>
//   CLASS <name> SUPER <superclass> [LIB]
//   FIELD <name> <type_desc>
//   METHOD <name> <proto> REGS <n> [NATIVE]
//     <index> <opcode_class> regs=<r0,r1,...> [lit=<json>] [ref=<owner>-><name>:<proto>] [tgt=<index>]
//   <blank line terminates a method>
//
// The entropy, LIB and NATIVE tokens are optional on input (entropy
// defaults to 0, flags to false); the dumper always writes them out so
// that load(dump(m)) == m holds for every well-formed model.

/// Deterministic canonical serialization, in model order. Re-parsing the
/// result yields an equal AppModel.
std::string dump_textual_ir(const AppModel& app);

/// Parses a textual IR document. Throws SyntaxError for malformed lines
/// and InvariantError for out-of-range registers/branch targets or
/// duplicate class names. The returned model has origin TextualIr.
AppModel load_textual_ir(std::string_view doc);

}  // namespace obfuscan
