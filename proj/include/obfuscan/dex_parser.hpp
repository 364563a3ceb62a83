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
#include <span>
#include <vector>

#include "obfuscan/ir.hpp"

namespace obfuscan {

/// Parses one dex file into class definitions.
///
/// Validates the `dex\n035\0` magic (versions 035-039 accepted), walks the
/// string/type/proto/field/method id tables and class_defs, and decodes
/// every code item's instruction stream using the published format-width
/// table. Opcodes outside the mapped set become Other with their operands
/// decoded per format; an opcode with no published format rejects the dex.
///
/// Throws BadMagic, UnsupportedVersion, TruncatedSection or
/// MalformedUleb128 — all fatal for this dex only.
std::vector<ClassDef> parse_dex(std::span<const std::uint8_t> bytes);

}  // namespace obfuscan
