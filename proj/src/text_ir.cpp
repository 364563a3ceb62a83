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

#include "obfuscan/text_ir.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "obfuscan/errors.hpp"

namespace obfuscan {

namespace {

std::string json_number(double v) { return nlohmann::json(v).dump(); }

void dump_instr(std::ostringstream& out, const Instr& ins) {
  out << "  " << ins.index << ' ' << to_string(ins.op) << " regs=";
  for (std::size_t i = 0; i < ins.operands.size(); ++i) {
    if (i) out << ',';
    out << ins.operands[i];
  }
  if (ins.string_lit) {
    out << " lit=" << nlohmann::json(*ins.string_lit).dump();
  } else if (ins.int_lit) {
    out << " lit=" << *ins.int_lit;
  }
  if (ins.method_ref) {
    out << " ref=" << ins.method_ref->owner_class << "->" << ins.method_ref->name
        << ':' << ins.method_ref->proto;
  } else if (ins.field_ref) {
    out << " ref=" << ins.field_ref->owner_class << "->" << ins.field_ref->name
        << ':' << ins.field_ref->type_desc;
  }
  if (ins.branch_target) out << " tgt=" << *ins.branch_target;
  out << '\n';
}

struct LineScanner {
  std::string_view text;
  std::size_t pos = 0;

  bool eof() const { return pos >= text.size(); }

  void skip_spaces() {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  }

  // Next whitespace-delimited token, empty at end of line.
  std::string_view token() {
    skip_spaces();
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ') ++pos;
    return text.substr(start, pos - start);
  }

  std::string_view rest() {
    skip_spaces();
    return text.substr(pos);
  }
};

std::uint64_t parse_uint(std::string_view tok, std::size_t line, const char* what) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw SyntaxError(line, std::string("expected ") + what + ", got '" +
                                std::string(tok) + "'");
  }
  return v;
}

// Splits "owner->name:proto". The proto/type slot is everything past the
// first ':' after '->'; owner and name never contain either separator.
void parse_ref(std::string_view tok, std::size_t line, std::string& owner,
               std::string& name, std::string& proto) {
  const auto arrow = tok.find("->");
  if (arrow == std::string_view::npos) throw SyntaxError(line, "ref missing '->'");
  const auto colon = tok.find(':', arrow + 2);
  if (colon == std::string_view::npos) throw SyntaxError(line, "ref missing ':'");
  owner = std::string(tok.substr(0, arrow));
  name = std::string(tok.substr(arrow + 2, colon - arrow - 2));
  proto = std::string(tok.substr(colon + 1));
  if (owner.empty() || name.empty() || proto.empty()) {
    throw SyntaxError(line, "ref component empty");
  }
}

// Extracts a JSON scalar starting at s[pos]; advances pos past it.
nlohmann::json parse_json_value(std::string_view s, std::size_t& pos, std::size_t line) {
  std::size_t end;
  if (pos < s.size() && s[pos] == '"') {
    end = pos + 1;
    bool esc = false;
    while (end < s.size()) {
      if (esc) {
        esc = false;
      } else if (s[end] == '\\') {
        esc = true;
      } else if (s[end] == '"') {
        break;
      }
      ++end;
    }
    if (end >= s.size()) throw SyntaxError(line, "unterminated string literal");
    ++end;
  } else {
    end = pos;
    while (end < s.size() && s[end] != ' ') ++end;
  }
  const auto slice = s.substr(pos, end - pos);
  nlohmann::json v = nlohmann::json::parse(slice, nullptr, false);
  if (v.is_discarded()) throw SyntaxError(line, "bad literal: " + std::string(slice));
  pos = end;
  return v;
}

Instr parse_instr_line(std::string_view body, std::size_t line) {
  Instr ins;
  LineScanner sc{body};
  ins.index = static_cast<std::uint32_t>(parse_uint(sc.token(), line, "instruction index"));
  const auto op_tok = sc.token();
  const auto op = opcode_class_from_string(op_tok);
  if (!op) throw SyntaxError(line, "unknown opcode class '" + std::string(op_tok) + "'");
  ins.op = *op;

  const auto regs_tok = sc.token();
  if (!regs_tok.starts_with("regs=")) throw SyntaxError(line, "expected regs=");
  std::string_view regs = regs_tok.substr(5);
  while (!regs.empty()) {
    const auto comma = regs.find(',');
    const auto one = regs.substr(0, comma);
    ins.operands.push_back(
        static_cast<std::uint16_t>(parse_uint(one, line, "register index")));
    if (comma == std::string_view::npos) break;
    regs.remove_prefix(comma + 1);
  }

  sc.skip_spaces();
  if (!sc.eof() && sc.rest().starts_with("lit=")) {
    sc.pos += 4;
    const auto v = parse_json_value(sc.text, sc.pos, line);
    if (v.is_string()) {
      ins.string_lit = v.get<std::string>();
    } else if (v.is_number_integer()) {
      ins.int_lit = v.get<std::int64_t>();
    } else {
      throw SyntaxError(line, "literal must be a string or integer");
    }
  }
  sc.skip_spaces();
  if (!sc.eof() && sc.rest().starts_with("ref=")) {
    sc.pos += 4;
    const auto tok = sc.token();
    std::string owner, name, proto;
    parse_ref(tok, line, owner, name, proto);
    const bool field_op = ins.op == OpcodeClass::FieldRead || ins.op == OpcodeClass::FieldWrite ||
                          ins.op == OpcodeClass::StaticRead || ins.op == OpcodeClass::StaticWrite;
    if (field_op) {
      ins.field_ref = FieldRef{std::move(owner), std::move(name), std::move(proto)};
    } else {
      ins.method_ref = MethodRef{std::move(owner), std::move(name), std::move(proto)};
    }
  }
  sc.skip_spaces();
  if (!sc.eof() && sc.rest().starts_with("tgt=")) {
    sc.pos += 4;
    ins.branch_target =
        static_cast<std::uint32_t>(parse_uint(sc.token(), line, "branch target"));
  }
  sc.skip_spaces();
  if (!sc.eof()) throw SyntaxError(line, "trailing junk: '" + std::string(sc.rest()) + "'");
  return ins;
}

}  // namespace

std::string dump_textual_ir(const AppModel& app) {
  std::ostringstream out;
  out << "APP " << app.app_id << '\n';
  for (const auto& f : app.file_entries) {
    out << "FILE " << f.size_bytes << " entropy=" << json_number(f.entropy) << ' '
        << f.path << '\n';
  }
  for (const auto& cls : app.classes) {
    out << "CLASS " << cls.name << " SUPER " << cls.superclass;
    if (cls.is_library) out << " LIB";
    out << '\n';
    for (const auto& fld : cls.fields) {
      out << "FIELD " << fld.name << ' ' << fld.type_desc << '\n';
    }
    for (const auto& m : cls.methods) {
      out << "METHOD " << m.name << ' ' << m.proto << " REGS " << m.register_count;
      if (m.is_native) out << " NATIVE";
      out << '\n';
      for (const auto& ins : m.instructions) dump_instr(out, ins);
      out << '\n';
    }
  }
  return std::move(out).str();
}

AppModel load_textual_ir(std::string_view doc) {
  AppModel app;
  app.origin = ModelOrigin::TextualIr;
  bool saw_header = false;
  ClassDef* cls = nullptr;
  MethodDef* method = nullptr;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= doc.size()) {
    if (start == doc.size() && line_no > 0) break;
    const auto nl = doc.find('\n', start);
    std::string_view line = doc.substr(start, nl == std::string_view::npos ? doc.size() - start : nl - start);
    start = (nl == std::string_view::npos) ? doc.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      method = nullptr;  // blank line terminates a method
      continue;
    }

    if (line.starts_with("  ")) {
      if (!method) throw SyntaxError(line_no, "instruction outside method");
      Instr ins = parse_instr_line(line.substr(2), line_no);
      if (ins.index != method->instructions.size()) {
        throw SyntaxError(line_no, "instruction index out of sequence");
      }
      method->instructions.push_back(std::move(ins));
      continue;
    }

    LineScanner sc{line};
    const auto kw = sc.token();
    if (kw == "APP") {
      if (saw_header) throw SyntaxError(line_no, "duplicate APP header");
      saw_header = true;
      app.app_id = std::string(sc.rest());
      continue;
    }
    if (!saw_header) throw SyntaxError(line_no, "expected APP header");

    if (kw == "FILE") {
      FileEntry f;
      f.size_bytes = parse_uint(sc.token(), line_no, "file size");
      sc.skip_spaces();
      if (sc.rest().starts_with("entropy=")) {
        sc.pos += 8;
        const auto v = parse_json_value(sc.text, sc.pos, line_no);
        if (!v.is_number()) throw SyntaxError(line_no, "entropy must be a number");
        f.entropy = v.get<double>();
        if (f.entropy < 0.0 || f.entropy > 8.0) {
          throw SyntaxError(line_no, "entropy out of [0,8]");
        }
      }
      f.path = std::string(sc.rest());
      if (f.path.empty()) throw SyntaxError(line_no, "FILE missing path");
      app.file_entries.push_back(std::move(f));
      method = nullptr;
    } else if (kw == "CLASS") {
      ClassDef c;
      c.name = std::string(sc.token());
      if (c.name.empty()) throw SyntaxError(line_no, "CLASS missing name");
      if (sc.token() != "SUPER") throw SyntaxError(line_no, "expected SUPER");
      c.superclass = std::string(sc.token());
      if (c.superclass.empty()) throw SyntaxError(line_no, "CLASS missing superclass");
      const auto flag = sc.token();
      if (flag == "LIB") {
        c.is_library = true;
      } else if (!flag.empty()) {
        throw SyntaxError(line_no, "unexpected token after superclass");
      }
      app.classes.push_back(std::move(c));
      cls = &app.classes.back();
      method = nullptr;
    } else if (kw == "FIELD") {
      if (!cls) throw SyntaxError(line_no, "FIELD outside class");
      FieldDef f;
      f.name = std::string(sc.token());
      f.type_desc = std::string(sc.token());
      if (f.name.empty() || f.type_desc.empty()) {
        throw SyntaxError(line_no, "FIELD needs name and type");
      }
      cls->fields.push_back(std::move(f));
      method = nullptr;
    } else if (kw == "METHOD") {
      if (!cls) throw SyntaxError(line_no, "METHOD outside class");
      MethodDef m;
      m.name = std::string(sc.token());
      m.proto = std::string(sc.token());
      if (m.name.empty() || m.proto.empty()) {
        throw SyntaxError(line_no, "METHOD needs name and proto");
      }
      if (sc.token() != "REGS") throw SyntaxError(line_no, "expected REGS");
      m.register_count =
          static_cast<std::uint16_t>(parse_uint(sc.token(), line_no, "register count"));
      const auto flag = sc.token();
      if (flag == "NATIVE") {
        m.is_native = true;
      } else if (!flag.empty()) {
        throw SyntaxError(line_no, "unexpected token after REGS");
      }
      m.is_constructor = (m.name == "<init>" || m.name == "<clinit>");
      cls->methods.push_back(std::move(m));
      method = &cls->methods.back();
    } else {
      throw SyntaxError(line_no, "unknown directive '" + std::string(kw) + "'");
    }
  }

  if (!saw_header) throw SyntaxError(1, "empty document");
  validate_model(app);
  return app;
}

}  // namespace obfuscan
