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

#include "obfuscan/detect_packing.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "obfuscan/errors.hpp"

namespace obfuscan {

namespace {

constexpr std::string_view kDefaultDb = R"(# Packing service fingerprints.
# PACKER <name>, then FILE <pattern> and CODE <class-name-prefix> lines.
# A FILE pattern starting with */ matches any path ending in the rest.

PACKER Ali
FILE lib/armeabi/libmobisec.so
FILE aliprotect.dat
CODE com.ali.fixHelper
CODE com.ali.mobisecenhance.StubApplication

PACKER Tencent
FILE lib/armeabi/libmain.so
FILE lib/armeabi/libshell.so
FILE lib/armeabi/mix.dex
CODE com.tencent.StubShell

PACKER Qihoo
FILE assets/libjiagu.so
CODE com.qihoo.util.StubApplication

PACKER iJiami
FILE assets/ijiami.dat
FILE */armeabi/libexec.so
FILE */armeabi/libexecmain.so
CODE com.shell.SuperApplication

PACKER Bangcle
FILE assets/bangcle_classes.jar
FILE lib/armeabi/libsecexe.so
FILE lib/armeabi/libsecmain.so
CODE com.secshell.shellwrapper.SecAppWrapper
CODE com.bangcle.protect.ApplicationWrapper

PACKER Baidu
FILE assets/baiduprotect.jar
FILE lib/armeabi/libbaiduprotect.so
CODE com.baidu.protect.StubApplication
)";

constexpr std::string_view kApplicationBase = "android.app.Application";

bool has_extension(std::string_view path, std::string_view ext) {
  return path.size() >= ext.size() &&
         path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
}

}  // namespace

std::string_view default_signature_db_text() { return kDefaultDb; }

std::vector<PackerSignature> parse_signature_db(std::string_view text) {
  std::vector<PackerSignature> db;
  std::unordered_set<std::string> names;
  PackerSignature* current = nullptr;
  std::size_t line_no = 0;

  auto finish_current = [&]() {
    if (current && current->file_signatures.empty() && current->code_signatures.empty()) {
      throw BadSignatureDb("packer '" + current->packer_name + "' declares no signatures");
    }
  };

  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto space = line.find(' ');
    const auto kw = line.substr(0, space);
    std::string_view arg = space == std::string_view::npos ? "" : line.substr(space + 1);
    if (arg.empty()) {
      throw BadSignatureDb("line " + std::to_string(line_no) + ": missing argument");
    }

    if (kw == "PACKER") {
      finish_current();
      if (!names.insert(std::string(arg)).second) {
        throw BadSignatureDb("duplicate packer name '" + std::string(arg) + "'");
      }
      db.push_back(PackerSignature{std::string(arg), {}, {}});
      current = &db.back();
    } else if (kw == "FILE") {
      if (!current) throw BadSignatureDb("FILE line before any PACKER");
      current->file_signatures.emplace_back(arg);
    } else if (kw == "CODE") {
      if (!current) throw BadSignatureDb("CODE line before any PACKER");
      current->code_signatures.emplace_back(arg);
    } else {
      throw BadSignatureDb("line " + std::to_string(line_no) + ": unknown directive '" +
                           std::string(kw) + "'");
    }
  }
  finish_current();
  return db;
}

std::vector<PackerSignature> load_signature_db(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadSignatureDb("cannot open signature db: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_signature_db(text);
}

bool file_signature_matches(std::string_view pattern, std::string_view path) {
  if (pattern.starts_with("*/")) {
    const auto rest = pattern.substr(2);
    if (path == rest) return true;
    if (path.size() > rest.size() && path.ends_with(rest) &&
        path[path.size() - rest.size() - 1] == '/') {
      return true;
    }
    return false;
  }
  return path == pattern;
}

PackingDetection detect_packing(const AppModel& app,
                                const std::vector<PackerSignature>& db,
                                const PackingConfig& config) {
  PackingDetection det;

  for (const auto& sig : db) {
    PackerMatch match;
    match.packer_name = sig.packer_name;
    for (const auto& pattern : sig.file_signatures) {
      for (const auto& fe : app.file_entries) {
        if (file_signature_matches(pattern, fe.path)) {
          match.evidence.push_back("file:" + pattern);
          break;
        }
      }
    }
    for (const auto& prefix : sig.code_signatures) {
      for (const auto& cls : app.classes) {
        if (cls.name.starts_with(prefix)) {
          match.evidence.push_back("code:" + prefix);
          break;
        }
      }
    }
    if (!match.evidence.empty()) det.matched_packers.push_back(std::move(match));
  }

  // Heuristic 1: some class transitively extends android.app.Application.
  std::unordered_map<std::string_view, const ClassDef*> by_name;
  for (const auto& cls : app.classes) by_name.emplace(cls.name, &cls);
  std::vector<const ClassDef*> app_classes;
  for (const auto& cls : app.classes) {
    std::string_view super = cls.superclass;
    std::unordered_set<std::string_view> visited;  // superclass cycles happen in hostile dexes
    while (!super.empty() && super != "-" && visited.insert(super).second) {
      if (super == kApplicationBase) {
        app_classes.push_back(&cls);
        break;
      }
      const auto it = by_name.find(super);
      if (it == by_name.end()) break;
      super = it->second->superclass;
    }
  }
  det.heuristic_flags.derived_application = !app_classes.empty();

  // Heuristic 2: a large high-entropy non-code file under assets/ or lib/.
  // Native libraries are legitimately high-entropy, so .so files only
  // count when the path itself is a known file signature.
  for (const auto& fe : app.file_entries) {
    if (!(fe.path.starts_with("assets/") || fe.path.starts_with("lib/"))) continue;
    if (fe.size_bytes < config.asset_size_min || fe.entropy < config.asset_entropy_min) continue;
    if (has_extension(fe.path, ".dex")) continue;
    if (has_extension(fe.path, ".so")) {
      bool is_signature_path = false;
      for (const auto& sig : db) {
        for (const auto& pattern : sig.file_signatures) {
          if (file_signature_matches(pattern, fe.path)) {
            is_signature_path = true;
            break;
          }
        }
        if (is_signature_path) break;
      }
      if (!is_signature_path) continue;
    }
    det.heuristic_flags.encrypted_asset = true;
    break;
  }

  // Heuristic 3: the derived Application class is a thin JNI bootstrap.
  for (const ClassDef* cls : app_classes) {
    std::size_t total_instr = 0;
    bool jni_hook = false;
    for (const auto& m : cls->methods) {
      total_instr += m.instructions.size();
      if (m.is_native) jni_hook = true;
      for (const auto& ins : m.instructions) {
        if (is_invoke(ins.op) && ins.method_ref &&
            ins.method_ref->owner_class == "java.lang.System" &&
            ins.method_ref->name == "loadLibrary") {
          jni_hook = true;
        }
      }
    }
    if (total_instr < config.wrapper_max_instr && jni_hook) {
      det.heuristic_flags.thin_wrapper = true;
      break;
    }
  }

  det.verdict = !det.matched_packers.empty() || det.heuristic_flags.count() >= 2;
  return det;
}

}  // namespace obfuscan
