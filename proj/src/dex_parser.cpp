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

#include "obfuscan/dex_parser.hpp"

#include <array>
#include <string>
#include <unordered_map>

#include "obfuscan/errors.hpp"
#include "obfuscan/utf8.hpp"

namespace obfuscan {

namespace {

constexpr std::uint32_t kNoIndex = 0xFFFFFFFF;
constexpr std::uint32_t kAccNative = 0x0100;

// Dalvik instruction formats that define an opcode's width and operand
// layout. Unused marks opcode bytes with no published format.
enum class Fmt : std::uint8_t {
  F10x, F12x, F11n, F11x, F10t,
  F20t, F22x, F21t, F21s, F21h, F21c, F23x, F22b, F22t, F22s, F22c,
  F30t, F32x, F31i, F31t, F31c, F35c, F3rc,
  F45cc, F4rcc, F51l,
  Unused,
};

enum class RefKind : std::uint8_t { None, String, Type, Field, Method, Ignored };

struct OpInfo {
  Fmt fmt = Fmt::Unused;
  OpcodeClass cls = OpcodeClass::Other;
  RefKind ref = RefKind::None;
};

int fmt_width(Fmt f) {
  switch (f) {
    case Fmt::F10x: case Fmt::F12x: case Fmt::F11n: case Fmt::F11x: case Fmt::F10t:
      return 1;
    case Fmt::F20t: case Fmt::F22x: case Fmt::F21t: case Fmt::F21s: case Fmt::F21h:
    case Fmt::F21c: case Fmt::F23x: case Fmt::F22b: case Fmt::F22t: case Fmt::F22s:
    case Fmt::F22c:
      return 2;
    case Fmt::F30t: case Fmt::F32x: case Fmt::F31i: case Fmt::F31t: case Fmt::F31c:
    case Fmt::F35c: case Fmt::F3rc:
      return 3;
    case Fmt::F45cc: case Fmt::F4rcc:
      return 4;
    case Fmt::F51l:
      return 5;
    case Fmt::Unused:
      return 0;
  }
  return 0;
}

const std::array<OpInfo, 256>& op_table() {
  static const std::array<OpInfo, 256> table = [] {
    std::array<OpInfo, 256> t{};
    auto set = [&](int op, Fmt f, OpcodeClass c, RefKind r = RefKind::None) {
      t[static_cast<std::size_t>(op)] = OpInfo{f, c, r};
    };
    auto range = [&](int lo, int hi, Fmt f, OpcodeClass c, RefKind r = RefKind::None) {
      for (int op = lo; op <= hi; ++op) set(op, f, c, r);
    };
    using OC = OpcodeClass;

    set(0x00, Fmt::F10x, OC::Other);  // nop (payload forms special-cased)
    set(0x01, Fmt::F12x, OC::Move);
    set(0x02, Fmt::F22x, OC::Move);
    set(0x03, Fmt::F32x, OC::Move);
    set(0x04, Fmt::F12x, OC::Move);
    set(0x05, Fmt::F22x, OC::Move);
    set(0x06, Fmt::F32x, OC::Move);
    set(0x07, Fmt::F12x, OC::Move);
    set(0x08, Fmt::F22x, OC::Move);
    set(0x09, Fmt::F32x, OC::Move);
    range(0x0a, 0x0c, Fmt::F11x, OC::MoveResult);
    set(0x0d, Fmt::F11x, OC::Other);  // move-exception
    set(0x0e, Fmt::F10x, OC::Return);
    range(0x0f, 0x11, Fmt::F11x, OC::Return);
    set(0x12, Fmt::F11n, OC::ConstNumeric);
    set(0x13, Fmt::F21s, OC::ConstNumeric);
    set(0x14, Fmt::F31i, OC::ConstNumeric);
    set(0x15, Fmt::F21h, OC::ConstNumeric);
    set(0x16, Fmt::F21s, OC::ConstNumeric);
    set(0x17, Fmt::F31i, OC::ConstNumeric);
    set(0x18, Fmt::F51l, OC::ConstNumeric);
    set(0x19, Fmt::F21h, OC::ConstNumeric);
    set(0x1a, Fmt::F21c, OC::ConstString, RefKind::String);
    set(0x1b, Fmt::F31c, OC::ConstString, RefKind::String);
    set(0x1c, Fmt::F21c, OC::Other, RefKind::Type);  // const-class
    set(0x1d, Fmt::F11x, OC::Other);
    set(0x1e, Fmt::F11x, OC::Other);
    set(0x1f, Fmt::F21c, OC::CheckCast, RefKind::Type);
    set(0x20, Fmt::F22c, OC::Other, RefKind::Type);  // instance-of
    set(0x21, Fmt::F12x, OC::ArrayOp);               // array-length
    set(0x22, Fmt::F21c, OC::NewInstance, RefKind::Type);
    set(0x23, Fmt::F22c, OC::NewArray, RefKind::Type);
    set(0x24, Fmt::F35c, OC::NewArray, RefKind::Type);
    set(0x25, Fmt::F3rc, OC::NewArray, RefKind::Type);
    set(0x26, Fmt::F31t, OC::ArrayOp);  // fill-array-data
    set(0x27, Fmt::F11x, OC::Other);    // throw
    set(0x28, Fmt::F10t, OC::Goto);
    set(0x29, Fmt::F20t, OC::Goto);
    set(0x2a, Fmt::F30t, OC::Goto);
    set(0x2b, Fmt::F31t, OC::Branch);  // packed-switch
    set(0x2c, Fmt::F31t, OC::Branch);  // sparse-switch
    range(0x2d, 0x31, Fmt::F23x, OC::ArithOp);  // cmpkind
    range(0x32, 0x37, Fmt::F22t, OC::Branch);
    range(0x38, 0x3d, Fmt::F21t, OC::Branch);
    range(0x44, 0x51, Fmt::F23x, OC::ArrayOp);
    range(0x52, 0x58, Fmt::F22c, OC::FieldRead, RefKind::Field);
    range(0x59, 0x5f, Fmt::F22c, OC::FieldWrite, RefKind::Field);
    range(0x60, 0x66, Fmt::F21c, OC::StaticRead, RefKind::Field);
    range(0x67, 0x6d, Fmt::F21c, OC::StaticWrite, RefKind::Field);
    set(0x6e, Fmt::F35c, OC::InvokeVirtual, RefKind::Method);
    set(0x6f, Fmt::F35c, OC::InvokeVirtual, RefKind::Method);  // invoke-super
    set(0x70, Fmt::F35c, OC::InvokeDirect, RefKind::Method);
    set(0x71, Fmt::F35c, OC::InvokeStatic, RefKind::Method);
    set(0x72, Fmt::F35c, OC::InvokeInterface, RefKind::Method);
    set(0x74, Fmt::F3rc, OC::InvokeVirtual, RefKind::Method);
    set(0x75, Fmt::F3rc, OC::InvokeVirtual, RefKind::Method);
    set(0x76, Fmt::F3rc, OC::InvokeDirect, RefKind::Method);
    set(0x77, Fmt::F3rc, OC::InvokeStatic, RefKind::Method);
    set(0x78, Fmt::F3rc, OC::InvokeInterface, RefKind::Method);
    set(0x7b, Fmt::F12x, OC::ArithOp);  // neg-int
    set(0x7c, Fmt::F12x, OC::BitOp);    // not-int
    set(0x7d, Fmt::F12x, OC::ArithOp);  // neg-long
    set(0x7e, Fmt::F12x, OC::BitOp);    // not-long
    set(0x7f, Fmt::F12x, OC::ArithOp);
    set(0x80, Fmt::F12x, OC::ArithOp);
    range(0x81, 0x8f, Fmt::F12x, OC::ArithOp);  // conversions
    range(0x90, 0x94, Fmt::F23x, OC::ArithOp);
    range(0x95, 0x9a, Fmt::F23x, OC::BitOp);
    range(0x9b, 0x9f, Fmt::F23x, OC::ArithOp);
    range(0xa0, 0xa5, Fmt::F23x, OC::BitOp);
    range(0xa6, 0xaf, Fmt::F23x, OC::ArithOp);
    range(0xb0, 0xb4, Fmt::F12x, OC::ArithOp);
    range(0xb5, 0xba, Fmt::F12x, OC::BitOp);
    range(0xbb, 0xbf, Fmt::F12x, OC::ArithOp);
    range(0xc0, 0xc5, Fmt::F12x, OC::BitOp);
    range(0xc6, 0xcf, Fmt::F12x, OC::ArithOp);
    range(0xd0, 0xd4, Fmt::F22s, OC::ArithOp);
    range(0xd5, 0xd7, Fmt::F22s, OC::BitOp);
    range(0xd8, 0xdc, Fmt::F22b, OC::ArithOp);
    range(0xdd, 0xe2, Fmt::F22b, OC::BitOp);
    set(0xfa, Fmt::F45cc, OC::InvokeVirtual, RefKind::Method);  // invoke-polymorphic
    set(0xfb, Fmt::F4rcc, OC::InvokeVirtual, RefKind::Method);
    set(0xfc, Fmt::F35c, OC::Other, RefKind::Ignored);  // invoke-custom
    set(0xfd, Fmt::F3rc, OC::Other, RefKind::Ignored);
    set(0xfe, Fmt::F21c, OC::Other, RefKind::Ignored);  // const-method-handle
    set(0xff, Fmt::F21c, OC::Other, RefKind::Ignored);  // const-method-type
    return t;
  }();
  return table;
}

class Cursor {
 public:
  Cursor(std::span<const std::uint8_t> data, const char* section)
      : data_(data), section_(section) {}

  std::uint8_t u8(std::size_t off) const {
    check(off, 1);
    return data_[off];
  }
  std::uint16_t u16(std::size_t off) const {
    check(off, 2);
    return static_cast<std::uint16_t>(data_[off] | (data_[off + 1] << 8));
  }
  std::uint32_t u32(std::size_t off) const {
    check(off, 4);
    return static_cast<std::uint32_t>(data_[off]) |
           (static_cast<std::uint32_t>(data_[off + 1]) << 8) |
           (static_cast<std::uint32_t>(data_[off + 2]) << 16) |
           (static_cast<std::uint32_t>(data_[off + 3]) << 24);
  }
  std::uint32_t uleb128(std::size_t& off) const {
    std::uint32_t result = 0;
    int shift = 0;
    for (int i = 0; i < 5; ++i) {
      if (off >= data_.size()) throw MalformedUleb128("uleb128 runs past end of data");
      const std::uint8_t b = data_[off++];
      result |= static_cast<std::uint32_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return result;
      shift += 7;
    }
    throw MalformedUleb128("uleb128 longer than five bytes");
  }
  std::span<const std::uint8_t> tail(std::size_t off) const {
    check(off, 0);
    return data_.subspan(off);
  }
  std::size_t size() const { return data_.size(); }

 private:
  void check(std::size_t off, std::size_t n) const {
    if (off > data_.size() || data_.size() - off < n) {
      throw TruncatedSection(section_, "read past end of file");
    }
  }

  std::span<const std::uint8_t> data_;
  const char* section_;
};

// Identifiers and descriptors feed the line-oriented textual IR, so
// whitespace and control characters are replaced with U+FFFD.
std::string sanitize_identifier(const std::string& s) {
  bool clean = true;
  for (unsigned char c : s) {
    if (c <= 0x20 || c == 0x7F) {
      clean = false;
      break;
    }
  }
  if (clean) return s;
  auto cps = utf8_decode(s);
  for (auto& cp : cps) {
    if (cp <= 0x20 || cp == 0x7F) cp = 0xFFFD;
  }
  return utf8_encode(cps);
}

std::string descriptor_to_binary(const std::string& desc) {
  if (desc.size() >= 2 && desc.front() == 'L' && desc.back() == ';') {
    std::string out = desc.substr(1, desc.size() - 2);
    for (char& c : out) {
      if (c == '/') c = '.';
    }
    return out;
  }
  return desc;  // primitives and array descriptors stay as-is
}

struct DexFile {
  std::vector<std::string> strings;
  std::vector<std::string> type_descs;   // raw descriptors
  std::vector<std::string> protos;       // rendered "(params)ret"
  std::vector<FieldRef> fields;
  std::vector<MethodRef> methods;
};

int64_t sign_extend(std::uint64_t v, int bits) {
  const std::uint64_t m = 1ULL << (bits - 1);
  return static_cast<std::int64_t>((v ^ m) - m);
}

struct Pending {
  std::size_t instr_idx;
  std::uint32_t addr;
  std::int32_t offset;
};

std::vector<Instr> decode_code(const Cursor& file, std::size_t insns_off,
                               std::uint32_t insns_size, std::uint16_t registers,
                               const DexFile& dex) {
  Cursor code(file.tail(insns_off), "code");
  std::vector<Instr> out;
  std::unordered_map<std::uint32_t, std::uint32_t> addr_to_index;
  std::vector<Pending> pendings;

  auto unit = [&](std::uint32_t a) -> std::uint16_t {
    if (a >= insns_size) throw TruncatedSection("code", "instruction overruns code item");
    return code.u16(static_cast<std::size_t>(a) * 2);
  };

  std::uint32_t addr = 0;
  while (addr < insns_size) {
    const std::uint16_t unit0 = unit(addr);
    const std::uint8_t op = static_cast<std::uint8_t>(unit0 & 0xFF);
    const std::uint8_t hi = static_cast<std::uint8_t>(unit0 >> 8);

    Instr ins;
    ins.index = static_cast<std::uint32_t>(out.size());
    std::uint32_t width;

    if (op == 0x00 && (hi == 0x01 || hi == 0x02 || hi == 0x03)) {
      // Switch/array payload pseudo-instructions carry data, not code.
      std::uint64_t w64;
      if (hi == 0x01) {
        w64 = static_cast<std::uint64_t>(unit(addr + 1)) * 2 + 4;
      } else if (hi == 0x02) {
        w64 = static_cast<std::uint64_t>(unit(addr + 1)) * 4 + 2;
      } else {
        const std::uint32_t elem = unit(addr + 1);
        const std::uint32_t size =
            static_cast<std::uint32_t>(unit(addr + 2)) | (static_cast<std::uint32_t>(unit(addr + 3)) << 16);
        const std::uint64_t data_bytes = static_cast<std::uint64_t>(elem) * size;
        w64 = (data_bytes + 1) / 2 + 4;
      }
      if (addr + w64 > insns_size) {
        throw TruncatedSection("code", "payload overruns code item");
      }
      width = static_cast<std::uint32_t>(w64);
      ins.op = OpcodeClass::Other;
    } else {
      const OpInfo& info = op_table()[op];
      if (info.fmt == Fmt::Unused) {
        throw TruncatedSection("code", "opcode 0x" + std::to_string(op) +
                                           " has no published format");
      }
      width = static_cast<std::uint32_t>(fmt_width(info.fmt));
      if (addr + static_cast<std::uint64_t>(width) > insns_size) {
        throw TruncatedSection("code", "instruction overruns code item");
      }
      ins.op = info.cls;

      const std::uint8_t aa = hi;
      const std::uint8_t a_low = hi & 0x0F;
      const std::uint8_t b_high = (hi >> 4) & 0x0F;
      std::uint32_t ref_idx = 0;
      bool have_ref = false;
      std::optional<std::int32_t> branch_off;

      switch (info.fmt) {
        case Fmt::F10x:
          break;
        case Fmt::F12x:
          ins.operands = {a_low, b_high};
          break;
        case Fmt::F11n:
          ins.operands = {a_low};
          ins.int_lit = sign_extend(b_high, 4);
          break;
        case Fmt::F11x:
          ins.operands = {aa};
          break;
        case Fmt::F10t:
          branch_off = static_cast<std::int8_t>(aa);
          break;
        case Fmt::F20t:
          branch_off = static_cast<std::int16_t>(unit(addr + 1));
          break;
        case Fmt::F22x:
          ins.operands = {aa, unit(addr + 1)};
          break;
        case Fmt::F21t:
          ins.operands = {aa};
          branch_off = static_cast<std::int16_t>(unit(addr + 1));
          break;
        case Fmt::F21s:
          ins.operands = {aa};
          if (ins.op == OpcodeClass::ConstNumeric) {
            ins.int_lit = static_cast<std::int16_t>(unit(addr + 1));
          }
          break;
        case Fmt::F21h: {
          ins.operands = {aa};
          const std::int64_t v = static_cast<std::int16_t>(unit(addr + 1));
          ins.int_lit = v << (op == 0x19 ? 48 : 16);
          break;
        }
        case Fmt::F21c:
          ins.operands = {aa};
          ref_idx = unit(addr + 1);
          have_ref = true;
          break;
        case Fmt::F23x: {
          const std::uint16_t u1 = unit(addr + 1);
          ins.operands = {aa, static_cast<std::uint16_t>(u1 & 0xFF),
                          static_cast<std::uint16_t>(u1 >> 8)};
          break;
        }
        case Fmt::F22b:
          ins.operands = {aa, static_cast<std::uint16_t>(unit(addr + 1) & 0xFF)};
          break;
        case Fmt::F22t:
          ins.operands = {a_low, b_high};
          branch_off = static_cast<std::int16_t>(unit(addr + 1));
          break;
        case Fmt::F22s:
          ins.operands = {a_low, b_high};
          break;
        case Fmt::F22c:
          ins.operands = {a_low, b_high};
          ref_idx = unit(addr + 1);
          have_ref = true;
          break;
        case Fmt::F30t:
          branch_off = static_cast<std::int32_t>(
              static_cast<std::uint32_t>(unit(addr + 1)) |
              (static_cast<std::uint32_t>(unit(addr + 2)) << 16));
          break;
        case Fmt::F32x:
          ins.operands = {unit(addr + 1), unit(addr + 2)};
          break;
        case Fmt::F31i:
          ins.operands = {aa};
          if (ins.op == OpcodeClass::ConstNumeric) {
            ins.int_lit = static_cast<std::int32_t>(
                static_cast<std::uint32_t>(unit(addr + 1)) |
                (static_cast<std::uint32_t>(unit(addr + 2)) << 16));
          }
          break;
        case Fmt::F31t:
          ins.operands = {aa};
          if (ins.op == OpcodeClass::Branch) {
            branch_off = static_cast<std::int32_t>(
                static_cast<std::uint32_t>(unit(addr + 1)) |
                (static_cast<std::uint32_t>(unit(addr + 2)) << 16));
          }
          break;
        case Fmt::F31c:
          ins.operands = {aa};
          ref_idx = static_cast<std::uint32_t>(unit(addr + 1)) |
                    (static_cast<std::uint32_t>(unit(addr + 2)) << 16);
          have_ref = true;
          break;
        case Fmt::F35c:
        case Fmt::F45cc: {
          const std::uint32_t count = (unit0 >> 12) & 0x0F;
          if (count > 5) throw TruncatedSection("code", "35c register count > 5");
          ref_idx = unit(addr + 1);
          have_ref = true;
          const std::uint16_t u2 = unit(addr + 2);
          const std::uint16_t regs[5] = {
              static_cast<std::uint16_t>(u2 & 0xF), static_cast<std::uint16_t>((u2 >> 4) & 0xF),
              static_cast<std::uint16_t>((u2 >> 8) & 0xF),
              static_cast<std::uint16_t>((u2 >> 12) & 0xF),
              static_cast<std::uint16_t>(hi & 0x0F)};
          for (std::uint32_t k = 0; k < count; ++k) ins.operands.push_back(regs[k]);
          break;
        }
        case Fmt::F3rc:
        case Fmt::F4rcc: {
          const std::uint32_t count = aa;
          ref_idx = unit(addr + 1);
          have_ref = true;
          const std::uint16_t first = unit(addr + 2);
          for (std::uint32_t k = 0; k < count; ++k) {
            ins.operands.push_back(static_cast<std::uint16_t>(first + k));
          }
          break;
        }
        case Fmt::F51l: {
          ins.operands = {aa};
          std::uint64_t v = 0;
          for (int k = 0; k < 4; ++k) {
            v |= static_cast<std::uint64_t>(unit(addr + 1 + static_cast<std::uint32_t>(k)))
                 << (16 * k);
          }
          ins.int_lit = static_cast<std::int64_t>(v);
          break;
        }
        case Fmt::Unused:
          break;
      }

      if (have_ref) {
        switch (info.ref) {
          case RefKind::String:
            if (ref_idx >= dex.strings.size()) {
              throw TruncatedSection("string_ids", "string index out of range");
            }
            ins.string_lit = dex.strings[ref_idx];
            break;
          case RefKind::Field:
            if (ref_idx >= dex.fields.size()) {
              throw TruncatedSection("field_ids", "field index out of range");
            }
            ins.field_ref = dex.fields[ref_idx];
            break;
          case RefKind::Method:
            if (ref_idx >= dex.methods.size()) {
              throw TruncatedSection("method_ids", "method index out of range");
            }
            ins.method_ref = dex.methods[ref_idx];
            break;
          case RefKind::Type:
            if (ref_idx >= dex.type_descs.size()) {
              throw TruncatedSection("type_ids", "type index out of range");
            }
            break;
          default:
            break;
        }
      }

      for (std::uint16_t r : ins.operands) {
        if (r >= registers) {
          throw TruncatedSection("code", "register v" + std::to_string(r) +
                                             " out of range");
        }
      }
      if (branch_off) {
        pendings.push_back(Pending{out.size(), addr, *branch_off});
      }
    }

    addr_to_index.emplace(addr, static_cast<std::uint32_t>(out.size()));
    out.push_back(std::move(ins));
    addr += width;
  }

  for (const Pending& p : pendings) {
    const std::int64_t target =
        static_cast<std::int64_t>(p.addr) + static_cast<std::int64_t>(p.offset);
    const auto it =
        (target >= 0) ? addr_to_index.find(static_cast<std::uint32_t>(target)) : addr_to_index.end();
    if (target < 0 || it == addr_to_index.end()) {
      throw TruncatedSection("code", "branch target not at an instruction boundary");
    }
    out[p.instr_idx].branch_target = it->second;
  }
  return out;
}

}  // namespace

std::vector<ClassDef> parse_dex(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw BadMagic("not a dex file: too small");
  static const std::uint8_t kMagic[4] = {'d', 'e', 'x', '\n'};
  for (int i = 0; i < 4; ++i) {
    if (bytes[static_cast<std::size_t>(i)] != kMagic[i]) {
      throw BadMagic("not a dex file");
    }
  }
  if (bytes[7] != 0 || bytes[4] != '0' || bytes[5] != '3' || bytes[6] < '5' ||
      bytes[6] > '9') {
    throw UnsupportedVersion("dex version not in 035..039");
  }

  Cursor header(bytes, "header");
  if (bytes.size() < 0x70) throw TruncatedSection("header", "shorter than header size");
  const std::uint32_t file_size = header.u32(0x20);
  if (file_size > bytes.size()) {
    throw TruncatedSection("header", "declared file_size exceeds actual length");
  }
  const std::uint32_t endian_tag = header.u32(0x28);
  if (endian_tag != 0x12345678) {
    throw UnsupportedVersion("big-endian dex is not supported");
  }

  const std::uint32_t string_ids_size = header.u32(0x38);
  const std::uint32_t string_ids_off = header.u32(0x3C);
  const std::uint32_t type_ids_size = header.u32(0x40);
  const std::uint32_t type_ids_off = header.u32(0x44);
  const std::uint32_t proto_ids_size = header.u32(0x48);
  const std::uint32_t proto_ids_off = header.u32(0x4C);
  const std::uint32_t field_ids_size = header.u32(0x50);
  const std::uint32_t field_ids_off = header.u32(0x54);
  const std::uint32_t method_ids_size = header.u32(0x58);
  const std::uint32_t method_ids_off = header.u32(0x5C);
  const std::uint32_t class_defs_size = header.u32(0x60);
  const std::uint32_t class_defs_off = header.u32(0x64);

  auto section_bounds = [&](const char* name, std::uint32_t off, std::uint32_t count,
                            std::uint32_t item_size) {
    if (count == 0) return;
    const std::uint64_t end =
        static_cast<std::uint64_t>(off) + static_cast<std::uint64_t>(count) * item_size;
    if (off == 0 || end > bytes.size()) {
      throw TruncatedSection(name, "section out of file bounds");
    }
  };
  section_bounds("string_ids", string_ids_off, string_ids_size, 4);
  section_bounds("type_ids", type_ids_off, type_ids_size, 4);
  section_bounds("proto_ids", proto_ids_off, proto_ids_size, 12);
  section_bounds("field_ids", field_ids_off, field_ids_size, 8);
  section_bounds("method_ids", method_ids_off, method_ids_size, 8);
  section_bounds("class_defs", class_defs_off, class_defs_size, 32);

  DexFile dex;

  Cursor strings_cur(bytes, "string_ids");
  dex.strings.reserve(string_ids_size);
  for (std::uint32_t i = 0; i < string_ids_size; ++i) {
    const std::uint32_t data_off = strings_cur.u32(string_ids_off + i * 4);
    if (data_off >= bytes.size()) {
      throw TruncatedSection("string_ids", "string data offset out of bounds");
    }
    std::size_t p = data_off;
    Cursor data_cur(bytes, "string_data");
    (void)data_cur.uleb128(p);  // utf16 length; the payload is NUL-terminated
    dex.strings.push_back(mutf8_to_utf8(bytes.subspan(p)));
  }

  Cursor types_cur(bytes, "type_ids");
  dex.type_descs.reserve(type_ids_size);
  for (std::uint32_t i = 0; i < type_ids_size; ++i) {
    const std::uint32_t str_idx = types_cur.u32(type_ids_off + i * 4);
    if (str_idx >= dex.strings.size()) {
      throw TruncatedSection("type_ids", "descriptor string index out of range");
    }
    dex.type_descs.push_back(sanitize_identifier(dex.strings[str_idx]));
  }

  Cursor protos_cur(bytes, "proto_ids");
  dex.protos.reserve(proto_ids_size);
  for (std::uint32_t i = 0; i < proto_ids_size; ++i) {
    const std::size_t base = proto_ids_off + static_cast<std::size_t>(i) * 12;
    const std::uint32_t return_idx = protos_cur.u32(base + 4);
    const std::uint32_t params_off = protos_cur.u32(base + 8);
    if (return_idx >= dex.type_descs.size()) {
      throw TruncatedSection("proto_ids", "return type index out of range");
    }
    std::string proto = "(";
    if (params_off != 0) {
      Cursor list_cur(bytes, "type_list");
      const std::uint32_t n = list_cur.u32(params_off);
      for (std::uint32_t k = 0; k < n; ++k) {
        const std::uint16_t t = list_cur.u16(params_off + 4 + static_cast<std::size_t>(k) * 2);
        if (t >= dex.type_descs.size()) {
          throw TruncatedSection("type_list", "parameter type index out of range");
        }
        proto += dex.type_descs[t];
      }
    }
    proto += ")";
    proto += dex.type_descs[return_idx];
    dex.protos.push_back(std::move(proto));
  }

  Cursor fields_cur(bytes, "field_ids");
  dex.fields.reserve(field_ids_size);
  for (std::uint32_t i = 0; i < field_ids_size; ++i) {
    const std::size_t base = field_ids_off + static_cast<std::size_t>(i) * 8;
    const std::uint16_t class_idx = fields_cur.u16(base);
    const std::uint16_t type_idx = fields_cur.u16(base + 2);
    const std::uint32_t name_idx = fields_cur.u32(base + 4);
    if (class_idx >= dex.type_descs.size() || type_idx >= dex.type_descs.size() ||
        name_idx >= dex.strings.size()) {
      throw TruncatedSection("field_ids", "field id component out of range");
    }
    dex.fields.push_back(FieldRef{descriptor_to_binary(dex.type_descs[class_idx]),
                                  sanitize_identifier(dex.strings[name_idx]),
                                  dex.type_descs[type_idx]});
  }

  Cursor methods_cur(bytes, "method_ids");
  dex.methods.reserve(method_ids_size);
  for (std::uint32_t i = 0; i < method_ids_size; ++i) {
    const std::size_t base = method_ids_off + static_cast<std::size_t>(i) * 8;
    const std::uint16_t class_idx = methods_cur.u16(base);
    const std::uint16_t proto_idx = methods_cur.u16(base + 2);
    const std::uint32_t name_idx = methods_cur.u32(base + 4);
    if (class_idx >= dex.type_descs.size() || proto_idx >= dex.protos.size() ||
        name_idx >= dex.strings.size()) {
      throw TruncatedSection("method_ids", "method id component out of range");
    }
    dex.methods.push_back(MethodRef{descriptor_to_binary(dex.type_descs[class_idx]),
                                    sanitize_identifier(dex.strings[name_idx]),
                                    dex.protos[proto_idx]});
  }

  std::vector<ClassDef> classes;
  classes.reserve(class_defs_size);
  Cursor defs_cur(bytes, "class_defs");
  for (std::uint32_t i = 0; i < class_defs_size; ++i) {
    const std::size_t base = class_defs_off + static_cast<std::size_t>(i) * 32;
    const std::uint32_t class_idx = defs_cur.u32(base);
    const std::uint32_t superclass_idx = defs_cur.u32(base + 8);
    const std::uint32_t class_data_off = defs_cur.u32(base + 24);
    if (class_idx >= dex.type_descs.size()) {
      throw TruncatedSection("class_defs", "class type index out of range");
    }
    ClassDef cls;
    cls.name = descriptor_to_binary(dex.type_descs[class_idx]);
    if (superclass_idx == kNoIndex) {
      cls.superclass = "-";
    } else if (superclass_idx < dex.type_descs.size()) {
      cls.superclass = descriptor_to_binary(dex.type_descs[superclass_idx]);
    } else {
      throw TruncatedSection("class_defs", "superclass index out of range");
    }

    if (class_data_off != 0) {
      if (class_data_off >= bytes.size()) {
        throw TruncatedSection("class_data", "class data offset out of bounds");
      }
      Cursor data_cur(bytes, "class_data");
      std::size_t p = class_data_off;
      const std::uint32_t static_fields = data_cur.uleb128(p);
      const std::uint32_t instance_fields = data_cur.uleb128(p);
      const std::uint32_t direct_methods = data_cur.uleb128(p);
      const std::uint32_t virtual_methods = data_cur.uleb128(p);

      auto read_fields = [&](std::uint32_t count) {
        std::uint32_t idx = 0;
        for (std::uint32_t k = 0; k < count; ++k) {
          idx += data_cur.uleb128(p);
          (void)data_cur.uleb128(p);  // access_flags
          if (idx >= dex.fields.size()) {
            throw TruncatedSection("class_data", "field index out of range");
          }
          cls.fields.push_back(FieldDef{dex.fields[idx].name, dex.fields[idx].type_desc});
        }
      };
      auto read_methods = [&](std::uint32_t count) {
        std::uint32_t idx = 0;
        for (std::uint32_t k = 0; k < count; ++k) {
          idx += data_cur.uleb128(p);
          const std::uint32_t access = data_cur.uleb128(p);
          const std::uint32_t code_off = data_cur.uleb128(p);
          if (idx >= dex.methods.size()) {
            throw TruncatedSection("class_data", "method index out of range");
          }
          MethodDef m;
          m.name = dex.methods[idx].name;
          m.proto = dex.methods[idx].proto;
          m.is_constructor = (m.name == "<init>" || m.name == "<clinit>");
          m.is_native = (access & kAccNative) != 0;
          if (code_off != 0) {
            Cursor code_cur(bytes, "code");
            m.register_count = code_cur.u16(code_off);
            const std::uint32_t insns_size = code_cur.u32(code_off + 12);
            const std::uint64_t insns_end =
                static_cast<std::uint64_t>(code_off) + 16 + static_cast<std::uint64_t>(insns_size) * 2;
            if (insns_end > bytes.size()) {
              throw TruncatedSection("code", "instruction stream out of bounds");
            }
            m.instructions = decode_code(header, code_off + 16, insns_size,
                                         m.register_count, dex);
          }
          cls.methods.push_back(std::move(m));
        }
      };
      read_fields(static_fields);
      read_fields(instance_fields);
      read_methods(direct_methods);
      read_methods(virtual_methods);
    }
    classes.push_back(std::move(cls));
  }
  return classes;
}

}  // namespace obfuscan
