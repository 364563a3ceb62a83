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
#include <string_view>
#include <vector>

namespace obfuscan {

// Coarse instruction taxonomy. Real Dalvik has ~230 opcodes; every feature
// the detectors compute (bit/loop counts, field traffic, invokes, string
// constants, branch structure) is expressible at this granularity, so the
// decoder collapses opcodes into these classes. Anything unmapped becomes
// Other with its operands still decoded.
enum class OpcodeClass : std::uint8_t {
  ConstString,
  ConstNumeric,
  Move,
  MoveResult,
  InvokeStatic,
  InvokeVirtual,
  InvokeDirect,
  InvokeInterface,
  FieldRead,
  FieldWrite,
  StaticRead,
  StaticWrite,
  ArrayOp,
  Branch,
  Goto,
  Return,
  BitOp,
  ArithOp,
  NewInstance,
  NewArray,
  CheckCast,
  Other,
};

std::string_view to_string(OpcodeClass c);
std::optional<OpcodeClass> opcode_class_from_string(std::string_view s);

inline bool is_invoke(OpcodeClass c) {
  return c == OpcodeClass::InvokeStatic || c == OpcodeClass::InvokeVirtual ||
         c == OpcodeClass::InvokeDirect || c == OpcodeClass::InvokeInterface;
}

struct MethodRef {
  std::string owner_class;  // dotted Java binary name
  std::string name;
  std::string proto;  // "(params)ret" descriptor

  auto operator<=>(const MethodRef&) const = default;
};

struct FieldRef {
  std::string owner_class;
  std::string name;
  std::string type_desc;

  auto operator<=>(const FieldRef&) const = default;
};

struct Instr {
  std::uint32_t index = 0;  // position in method, in code order
  OpcodeClass op = OpcodeClass::Other;
  std::vector<std::uint16_t> operands;  // register indices
  std::optional<std::string> string_lit;
  std::optional<std::int64_t> int_lit;
  std::optional<MethodRef> method_ref;
  std::optional<FieldRef> field_ref;
  std::optional<std::uint32_t> branch_target;

  bool operator==(const Instr&) const = default;
};

struct FieldDef {
  std::string name;
  std::string type_desc;

  bool operator==(const FieldDef&) const = default;
};

struct MethodDef {
  std::string name;
  std::string proto;
  std::uint16_t register_count = 0;
  std::vector<Instr> instructions;
  bool is_constructor = false;
  bool is_native = false;

  bool operator==(const MethodDef&) const = default;

  /// Return-type descriptor slice of the proto, empty when malformed.
  std::string_view return_desc() const;
};

struct ClassDef {
  std::string name;  // Java binary name, e.g. com.example.Foo
  std::string superclass;
  std::vector<FieldDef> fields;
  std::vector<MethodDef> methods;
  bool is_library = false;  // set by the library filter

  bool operator==(const ClassDef&) const = default;

  /// Last dot-segment of the binary name (keeps the `$` of nested classes).
  std::string_view simple_name() const;
};

struct FileEntry {
  std::string path;  // zip-relative, '/'-separated
  std::uint64_t size_bytes = 0;
  double entropy = 0.0;  // Shannon bits/byte over at most the first 64 KiB

  bool operator==(const FileEntry&) const = default;
};

enum class ModelOrigin : std::uint8_t { DexParsed, TextualIr };

/// Immutable-by-convention model of one app. Construction is single
/// threaded; afterwards the model is only read, so scan workers may share
/// it freely.
struct AppModel {
  std::string app_id;
  std::vector<FileEntry> file_entries;
  std::vector<ClassDef> classes;
  ModelOrigin origin = ModelOrigin::TextualIr;

  // Structural equality; origin is provenance, not content.
  bool operator==(const AppModel& o) const {
    return app_id == o.app_id && file_entries == o.file_entries && classes == o.classes;
  }
};

/// Enforces the model invariants: unique class names, literal/ref presence
/// per opcode class, register indices below register_count, branch targets
/// in range. Throws InvariantError.
void validate_model(const AppModel& app);

}  // namespace obfuscan
