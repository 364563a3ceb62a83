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

// End-to-end acceptance suite. Each numbered criterion prints one
// [PASS]/[FAIL] line; the process exits non-zero if any fail. The
// classifier and corpus criteria drive the obfuscan binary itself
// (--bin <path>).

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "obfuscan/detect_packing.hpp"
#include "obfuscan/detect_renaming.hpp"
#include "obfuscan/detect_reflection.hpp"
#include "obfuscan/dex_parser.hpp"
#include "obfuscan/errors.hpp"
#include "obfuscan/ingest.hpp"
#include "obfuscan/report.hpp"
#include "obfuscan/text_ir.hpp"
#include "support/dex_builder.hpp"
#include "support/synthetic.hpp"
#include "support/zip_builder.hpp"

namespace {

using namespace obfuscan;
using obfuscan::testing::Rng;
using nlohmann::json;
namespace fs = std::filesystem;

std::string g_bin;
fs::path g_tmp;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw Failure(msg);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  const std::string full = cmd + " 2>>" + (g_tmp / "stderr.log").string();
  FILE* pipe = popen(full.c_str(), "r");
  require(pipe != nullptr, "popen failed for: " + cmd);
  CmdResult result;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
  const int rc = pclose(pipe);
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// 1. Reflection oracle: the constant forName/getMethod sequence reading a
//    hidden system property resolves to its exact target names.
// ---------------------------------------------------------------------------

const char* kSmaliFixture =
    "APP smali-fixture\n"
    "CLASS com.sample.Probe SUPER java.lang.Object\n"
    "METHOD probe ()V REGS 8\n"
    "  0 ConstNumeric regs=1 lit=0\n"
    "  1 ConstString regs=0 lit=\"android.os.SystemProperties\"\n"
    "  2 InvokeStatic regs=0 ref=java.lang.Class->forName:(Ljava/lang/String;)Ljava/lang/Class;\n"
    "  3 MoveResult regs=0\n"
    "  4 ConstString regs=2 lit=\"get\"\n"
    "  5 InvokeVirtual regs=0,2,3 ref=java.lang.Class->getMethod:(Ljava/lang/String;[Ljava/lang/Class;)Ljava/lang/reflect/Method;\n"
    "  6 MoveResult regs=4\n"
    "  7 InvokeVirtual regs=4,5,6 ref=java.lang.reflect.Method->invoke:(Ljava/lang/Object;[Ljava/lang/Object;)Ljava/lang/Object;\n"
    "  8 Return regs=\n"
    "\n";

void criterion_1_reflection_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const AppModel app = load_textual_ir(kSmaliFixture);
  const auto sites = find_reflection_sites(app);
  require(sites.size() == 1, "expected exactly one reflection site, got " +
                                 std::to_string(sites.size()));
  const auto& site = sites[0];
  require(site.status == RecoveryStatus::Recovered, "site not Recovered");
  require(site.recovered_class == "android.os.SystemProperties",
          "wrong recovered class");
  require(site.recovered_method == "get", "wrong recovered method");
  require(seconds_since(start) < 1.0, "took longer than 1 s");
}

// ---------------------------------------------------------------------------
// 2. Packing signature suite: every file and code signature of all six
//    packers matches in isolation, and only its own packer; a control app
//    matches nothing.
// ---------------------------------------------------------------------------

void criterion_2_packing_signatures() {
  const auto start = std::chrono::steady_clock::now();
  const auto db = parse_signature_db(default_signature_db_text());
  require(db.size() == 6, "default db must list six packers");
  const LibraryPrefixList no_libs;
  int checked = 0;

  for (const auto& packer : db) {
    for (const auto& file_sig : packer.file_signatures) {
      std::string path = file_sig;
      if (path.starts_with("*/")) path = "lib/" + path.substr(2);
      // Through the real container path: a zip holding only that file.
      const auto zip = obfuscan::testing::build_zip(
          {{path, obfuscan::testing::to_bytes("payload")}});
      const auto parsed = parse_apk(zip, no_libs, "sig");
      const auto det = detect_packing(parsed.model, db, PackingConfig{});
      require(det.matched_packers.size() == 1,
              file_sig + ": expected exactly one packer match");
      require(det.matched_packers[0].packer_name == packer.packer_name,
              file_sig + ": matched wrong packer");
      require(det.verdict, file_sig + ": verdict must be true");
      ++checked;
    }
    for (const auto& code_sig : packer.code_signatures) {
      AppModel app;
      app.app_id = "sig";
      ClassDef cls;
      cls.name = code_sig;
      cls.superclass = "java.lang.Object";
      app.classes.push_back(std::move(cls));
      const auto det = detect_packing(app, db, PackingConfig{});
      require(det.matched_packers.size() == 1,
              code_sig + ": expected exactly one packer match");
      require(det.matched_packers[0].packer_name == packer.packer_name,
              code_sig + ": matched wrong packer");
      ++checked;
    }
  }
  require(checked == 22, "expected 22 signatures from the six packers, got " +
                             std::to_string(checked));

  const auto control_zip = obfuscan::testing::build_zip(
      {{"res/drawable/icon.png", obfuscan::testing::to_bytes("png-bytes")},
       {"classes.dex", obfuscan::testing::build_single_class_dex()}});
  const auto control = parse_apk(control_zip, no_libs, "control");
  const auto det = detect_packing(control.model, db, PackingConfig{});
  require(det.matched_packers.empty(), "control app must match nothing");
  require(!det.verdict, "control app must not be packed");
  require(seconds_since(start) < 5.0, "took longer than 5 s");
}

// ---------------------------------------------------------------------------
// 3. Control-flow signatures of the two constructor shapes.
// ---------------------------------------------------------------------------

void criterion_3_cf_signatures() {
  auto instr = [](OpcodeClass op, std::vector<std::uint16_t> regs,
                  std::optional<std::uint32_t> target =
                      std::nullopt) {
    Instr i;
    i.op = op;
    i.operands = std::move(regs);
    i.branch_target = target;
    if (op == OpcodeClass::InvokeDirect) {
      i.method_ref = MethodRef{"java.lang.Object", "<init>", "()V"};
    }
    if (op == OpcodeClass::FieldWrite || op == OpcodeClass::FieldRead) {
      i.field_ref = FieldRef{"p.MD5State", "state", "[I"};
    }
    return i;
  };
  auto finish = [](MethodDef& m) {
    for (std::size_t i = 0; i < m.instructions.size(); ++i) {
      m.instructions[i].index = static_cast<std::uint32_t>(i);
    }
  };

  MethodDef init;
  init.name = "<init>";
  init.proto = "()V";
  init.register_count = 4;
  init.instructions = {
      instr(OpcodeClass::InvokeDirect, {0}),
      instr(OpcodeClass::FieldWrite, {1, 0}),
      instr(OpcodeClass::FieldRead, {1, 0}),
      instr(OpcodeClass::FieldRead, {1, 0}),
      instr(OpcodeClass::Return, {}),
  };
  finish(init);
  require(cf_signature(init) == "B[P1F1F0F0R]",
          "straight-line signature mismatch: got " + cf_signature(init));

  MethodDef copy;
  copy.name = "<init>";
  copy.proto = "(Lp.MD5State;)V";
  copy.register_count = 6;
  copy.instructions = {
      instr(OpcodeClass::InvokeDirect, {0}),
      instr(OpcodeClass::FieldWrite, {1, 0}),
      instr(OpcodeClass::FieldRead, {2, 0}),
      instr(OpcodeClass::Branch, {2}, 7),
      instr(OpcodeClass::FieldRead, {3, 0}),
      instr(OpcodeClass::FieldRead, {4, 1}),
      instr(OpcodeClass::Goto, {}, 2),
      instr(OpcodeClass::Return, {}),
  };
  finish(copy);
  require(cf_signature(copy) == "B[P1F1]B[F0I]B[F0F0G]B[R]",
          "loop signature mismatch: got " + cf_signature(copy));
}

// ---------------------------------------------------------------------------
// 4./5. Classifier criteria, through the CLI train command.
// ---------------------------------------------------------------------------

struct TrainOutcome {
  double accuracy = 0.0;
  double fn_rate = 1.0;
  int n_train = 0;
  int n_holdout = 0;
  fs::path model_path;
};

TrainOutcome train_via_cli(const std::string& technique, const fs::path& corpus_dir,
                           const std::vector<std::pair<fs::path, std::string>>& files) {
  std::ostringstream manifest;
  for (const auto& [path, label] : files) {
    manifest << "synthetic " << path.string() << " " << label << "\n";
  }
  const fs::path manifest_path = corpus_dir / (technique + ".manifest");
  write_file(manifest_path, manifest.str());
  const fs::path model_path = g_tmp / (technique + ".model.json");

  const auto result = run_cmd(g_bin + " train --technique " + technique + " --corpus " +
                              manifest_path.string() + " --out " + model_path.string() +
                              " --holdout 0.25");
  require(result.exit_code == 0,
          technique + " train exited " + std::to_string(result.exit_code));
  const json j = json::parse(result.out, nullptr, false);
  require(!j.is_discarded(), technique + " train printed no JSON");
  TrainOutcome outcome;
  outcome.accuracy = j.at("holdout_accuracy").get<double>();
  outcome.fn_rate = j.at("holdout_fn_rate").get<double>();
  outcome.n_train = j.at("n_train").get<int>();
  outcome.n_holdout = j.at("n_holdout").get<int>();
  outcome.model_path = model_path;
  return outcome;
}

fs::path g_renaming_model;
fs::path g_stringenc_model;

void criterion_4_renaming_classifier() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(4001);
  const fs::path dir = g_tmp / "renaming_corpus";
  fs::create_directories(dir);

  std::vector<std::pair<fs::path, std::string>> files;
  for (int i = 0; i < 200; ++i) {
    AppModel app = obfuscan::testing::make_natural_app(rng, "nat" + std::to_string(i));
    const fs::path p = dir / ("nat" + std::to_string(i) + ".ir");
    write_file(p, dump_textual_ir(app));
    files.emplace_back(p, "plain");
  }
  for (int i = 0; i < 200; ++i) {
    AppModel app =
        obfuscan::testing::make_renamed_app(rng, "obf" + std::to_string(i), i % 10 == 0);
    const fs::path p = dir / ("obf" + std::to_string(i) + ".ir");
    write_file(p, dump_textual_ir(app));
    files.emplace_back(p, "obfuscated");
  }

  const auto outcome = train_via_cli("renaming", dir, files);
  require(outcome.n_train == 300 && outcome.n_holdout == 100,
          "expected a 300/100 split, got " + std::to_string(outcome.n_train) + "/" +
              std::to_string(outcome.n_holdout));
  require(outcome.accuracy >= 0.95,
          "holdout accuracy " + std::to_string(outcome.accuracy) + " below 0.95");
  require(outcome.fn_rate <= 0.05,
          "false negative rate " + std::to_string(outcome.fn_rate) + " above 0.05");
  g_renaming_model = outcome.model_path;
  require(seconds_since(start) < 60.0, "took longer than 60 s");
}

void criterion_5_stringenc_classifier() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(5001);
  const fs::path dir = g_tmp / "stringenc_corpus";
  fs::create_directories(dir);

  std::vector<std::pair<fs::path, std::string>> files;
  for (int i = 0; i < 400; ++i) {
    const bool encrypted = i >= 200;
    AppModel app = obfuscan::testing::make_natural_app(
        rng, (encrypted ? "enc" : "pl") + std::to_string(i));
    obfuscan::testing::inject_strings(
        app, encrypted
                 ? obfuscan::testing::encrypted_strings(
                       rng, static_cast<int>(obfuscan::testing::rand_range(rng, 25, 45)))
                 : obfuscan::testing::plain_strings(
                       rng, static_cast<int>(obfuscan::testing::rand_range(rng, 25, 45))));
    const fs::path p = dir / ("s" + std::to_string(i) + ".ir");
    write_file(p, dump_textual_ir(app));
    files.emplace_back(p, encrypted ? "encrypted" : "plain");
  }

  const auto outcome = train_via_cli("stringenc", dir, files);
  require(outcome.n_holdout == 100, "expected 100 held-out apps");
  require(outcome.accuracy >= 0.95,
          "holdout accuracy " + std::to_string(outcome.accuracy) + " below 0.95");
  g_stringenc_model = outcome.model_path;
  require(seconds_since(start) < 60.0, "took longer than 60 s");
}

// ---------------------------------------------------------------------------
// 6. Property suites that need no trained model.
// ---------------------------------------------------------------------------

void criterion_6_property_suites() {
  // (a) featurizer equals brute force over 1,000 random charset strings.
  {
    Rng rng(6001);
    const auto& members = Charset::identifier().members();
    std::vector<std::string> names;
    for (int i = 0; i < 1000; ++i) {
      std::string s;
      const auto len = obfuscan::testing::rand_range(rng, 0, 14);
      for (std::uint64_t k = 0; k < len; ++k) {
        s.push_back(static_cast<char>(
            members[obfuscan::testing::rand_range(rng, 0, members.size() - 1)]));
      }
      names.push_back(std::move(s));
    }
    std::map<std::string, double> expected;
    double total = 0;
    for (const auto& s : names) {
      for (std::size_t i = 0; i + 3 <= s.size(); ++i) {
        expected[s.substr(i, 3)] += 1.0;
        total += 1.0;
      }
    }
    for (auto& [g, c] : expected) c /= total;
    const auto fv = featurize(names, Charset::identifier());
    require(fv.counts == expected, "featurizer disagrees with brute force");

    // (b) normalization: non-empty vectors sum to 1 within 1e-9.
    double sum = 0;
    for (const auto& [g, c] : fv.counts) sum += c;
    require(std::abs(sum - 1.0) <= 1e-9, "normalized sum off by more than 1e-9");
  }

  // (c) textual-IR round-trip over every fixture written so far, plus the
  //     inline ones.
  {
    std::vector<std::string> docs = {kSmaliFixture,
                                     obfuscan::testing::single_class_fixture_ir()};
    for (const auto& entry : fs::recursive_directory_iterator(g_tmp)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ir") {
        docs.push_back(read_file(entry.path()));
      }
    }
    require(docs.size() > 500, "expected the classifier corpora on disk");
    for (const auto& doc : docs) {
      const AppModel model = load_textual_ir(doc);
      const std::string dumped = dump_textual_ir(model);
      require(load_textual_ir(dumped) == model, "round-trip changed a model");
    }
  }

  // (d) ingest fuzz: 10,000 inputs, typed errors only.
  {
    Rng rng(6002);
    const auto base_zip = obfuscan::testing::build_zip(
        {{"classes.dex", obfuscan::testing::build_single_class_dex()},
         {"assets/a.txt", obfuscan::testing::to_bytes("hello")}});
    const auto base_dex = obfuscan::testing::build_single_class_dex();
    const LibraryPrefixList no_libs;
    for (int i = 0; i < 10000; ++i) {
      std::vector<std::uint8_t> bytes;
      switch (i % 4) {
        case 0: {
          bytes.resize(obfuscan::testing::rand_range(rng, 0, 1024));
          for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
          break;
        }
        case 1: {
          bytes = {'P', 'K', 3, 4};
          const auto extra = obfuscan::testing::rand_range(rng, 0, 512);
          for (std::uint64_t k = 0; k < extra; ++k) {
            bytes.push_back(static_cast<std::uint8_t>(rng()));
          }
          break;
        }
        case 2: {
          bytes = base_zip;
          const auto flips = obfuscan::testing::rand_range(rng, 1, 8);
          for (std::uint64_t k = 0; k < flips; ++k) {
            bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
          }
          break;
        }
        default: {
          bytes = base_dex;
          const auto flips = obfuscan::testing::rand_range(rng, 1, 8);
          for (std::uint64_t k = 0; k < flips; ++k) {
            bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
          }
          break;
        }
      }
      try {
        if (i % 2 == 0) {
          (void)parse_apk(bytes, no_libs, "fuzz");
        } else {
          (void)parse_dex(bytes);
        }
      } catch (const Error&) {
        // a typed error is an acceptable outcome; anything else aborts
      }
    }
  }

  // (e) slicer insensitivity to unrelated-instruction insertion.
  {
    Rng rng(6003);
    AppModel base_app;
    base_app.app_id = "sl";
    ClassDef cls;
    cls.name = "p.C";
    cls.superclass = "java.lang.Object";
    base_app.classes.push_back(cls);
    obfuscan::testing::plant_reflection(base_app, "probe", "android.os.SystemProperties",
                                        "get", true);
    const MethodDef base = base_app.classes[0].methods[0];
    std::uint32_t forname_use = 0;
    for (const auto& ins : base.instructions) {
      if (is_invoke(ins.op) && ins.method_ref && ins.method_ref->name == "forName") {
        forname_use = ins.index;
      }
    }
    const auto base_state = slice_and_resolve(base, forname_use, base.instructions[forname_use].operands[0]);
    require(base_state.resolved_value.has_value(), "base slice must resolve");

    for (int trial = 0; trial < 100; ++trial) {
      MethodDef mutated = base;
      // Avoid splitting an invoke/move-result pair.
      std::vector<std::uint32_t> positions;
      for (std::uint32_t p = 0; p <= mutated.instructions.size(); ++p) {
        const bool splits_pair =
            p > 0 && p < mutated.instructions.size() &&
            is_invoke(mutated.instructions[p - 1].op) &&
            mutated.instructions[p].op == OpcodeClass::MoveResult;
        if (!splits_pair) positions.push_back(p);
      }
      const auto at = positions[obfuscan::testing::rand_range(rng, 0, positions.size() - 1)];
      Instr filler;
      if (obfuscan::testing::rand_range(rng, 0, 1) == 0) {
        filler.op = OpcodeClass::ConstString;
        filler.operands = {7};
        filler.string_lit = "noise";
      } else {
        filler.op = OpcodeClass::ConstNumeric;
        filler.operands = {6};
        filler.int_lit = 7;
      }
      mutated.instructions.insert(
          mutated.instructions.begin() + static_cast<std::ptrdiff_t>(at), filler);
      for (std::size_t k = 0; k < mutated.instructions.size(); ++k) {
        mutated.instructions[k].index = static_cast<std::uint32_t>(k);
      }
      const std::uint32_t use = forname_use + (at <= forname_use ? 1 : 0);
      const auto state =
          slice_and_resolve(mutated, use, mutated.instructions[use].operands[0]);
      require(state.resolved_value == base_state.resolved_value,
              "insertion changed the resolved value");
      std::vector<std::uint32_t> expected;
      for (auto idx : base_state.slice) expected.push_back(idx + (idx >= at ? 1 : 0));
      require(state.slice == expected, "insertion changed the slice");
    }
  }

  // (f) aggregate additivity over random report sets.
  {
    Rng rng(6004);
    auto make_reports = [&](const std::string& tag, int n) {
      std::vector<ScanReport> reports;
      for (int i = 0; i < n; ++i) {
        ScanReport r;
        r.app_id = tag + std::to_string(i);
        r.source_tag = tag;
        RenamingDetection ren;
        ren.verdict = obfuscan::testing::rand_range(rng, 0, 1) == 1;
        r.renaming = ren;
        PackingDetection pack;
        pack.verdict = obfuscan::testing::rand_range(rng, 0, 1) == 1;
        r.packing = pack;
        ReflectionSummary refl;
        const auto sites = obfuscan::testing::rand_range(rng, 0, 3);
        for (std::uint64_t s = 0; s < sites; ++s) {
          ReflectionSite site;
          site.container = MethodRef{"p.C", "m", "()V"};
          if (obfuscan::testing::rand_range(rng, 0, 1) == 1) {
            site.status = RecoveryStatus::Recovered;
            site.recovered_class = "t.T" + std::to_string(obfuscan::testing::rand_range(rng, 0, 2));
            site.recovered_method = "m";
          }
          refl.sites.push_back(site);
        }
        refl.uses_reflection = !refl.sites.empty();
        r.reflection = refl;
        reports.push_back(std::move(r));
      }
      return reports;
    };
    const auto a = make_reports("ga", 17);
    const auto b = make_reports("gb", 11);
    auto both = a;
    both.insert(both.end(), b.begin(), b.end());
    const auto ca = aggregate(a, 5);
    const auto cb = aggregate(b, 5);
    const auto cab = aggregate(both, 5);
    require(cab.tags.at("ga") == ca.tags.at("ga"), "tag ga not additive");
    require(cab.tags.at("gb") == cb.tags.at("gb"), "tag gb not additive");
  }

  // (g) size-similarity symmetry and range over random method pairs.
  {
    Rng rng(6005);
    for (int trial = 0; trial < 300; ++trial) {
      auto make = [&](std::size_t n) {
        MethodDef m;
        m.name = "m";
        m.proto = "()V";
        m.register_count = 4;
        for (std::size_t i = 0; i < n; ++i) {
          Instr ins;
          ins.index = static_cast<std::uint32_t>(i);
          ins.op = OpcodeClass::ArithOp;
          ins.operands = {0, 1, 2};
          m.instructions.push_back(std::move(ins));
        }
        return m;
      };
      const auto f1 = make(obfuscan::testing::rand_range(rng, 1, 500));
      const auto f2 = make(obfuscan::testing::rand_range(rng, 1, 500));
      const double s12 = function_size_sim(f1, f2);
      const double s21 = function_size_sim(f2, f1);
      require(s12 == s21, "size similarity not symmetric");
      require(s12 > 0.0 && s12 <= 1.0, "size similarity out of range");
    }
  }
}

// ---------------------------------------------------------------------------
// 7. End-to-end corpus with planted ground truth through the CLI.
// ---------------------------------------------------------------------------

struct TagPlan {
  std::string tag;
  int renaming;
  int stringenc;
  int reflection_apps;
  int packing;
};

struct TagTruth {
  int renaming = 0;
  int stringenc = 0;
  int reflection_apps = 0;
  int packing = 0;
  int sites = 0;
  int recovered = 0;
};

void strip_timings(json& report) { report["timings_ms"] = json::object(); }

void criterion_7_end_to_end_corpus() {
  require(!g_renaming_model.empty() && !g_stringenc_model.empty(),
          "classifier criteria must run first to provide models");
  Rng rng(7001);
  const fs::path corpus = g_tmp / "corpus";
  fs::create_directories(corpus);

  const std::vector<TagPlan> plans = {
      {"googleplay", 4, 2, 8, 3},
      {"thirdparty", 9, 5, 9, 6},
      {"malware", 12, 9, 11, 8},
  };
  std::map<std::string, TagTruth> truth;
  const auto& pool = obfuscan::testing::reflection_target_pool();

  for (const auto& plan : plans) {
    TagTruth& t = truth[plan.tag];
    for (int i = 0; i < 20; ++i) {
      const bool ren = i < plan.renaming;
      const bool enc = (i + 7) % 20 < plan.stringenc;
      const bool refl = (i + 3) % 20 < plan.reflection_apps;
      const bool pack = (i + 11) % 20 < plan.packing;
      t.renaming += ren;
      t.stringenc += enc;
      t.reflection_apps += refl;
      t.packing += pack;

      const std::string id = plan.tag + "_" + std::to_string(i);
      AppModel app = ren ? obfuscan::testing::make_renamed_app(rng, id, false)
                         : obfuscan::testing::make_natural_app(rng, id);
      obfuscan::testing::inject_strings(
          app, enc ? obfuscan::testing::encrypted_strings(rng, 30)
                   : obfuscan::testing::plain_strings(rng, 30));
      if (refl) {
        const auto n_sites = obfuscan::testing::rand_range(rng, 1, 2);
        for (std::uint64_t s = 0; s < n_sites; ++s) {
          const bool recoverable = obfuscan::testing::rand_range(rng, 0, 2) != 0;
          const auto& target = pool[obfuscan::testing::rand_range(rng, 0, pool.size() - 1)];
          obfuscan::testing::plant_reflection(
              app, obfuscan::testing::style_method_name(rng, ren) + std::to_string(s),
              target.class_name, target.method_name, recoverable);
          ++t.sites;
          if (recoverable) ++t.recovered;
        }
      }
      if (pack) obfuscan::testing::plant_packing_marker(app, rng);
      write_file(corpus / (id + ".ir"), dump_textual_ir(app));
    }
  }

  auto scan_all = [&](const fs::path& out_dir, int parallelism) {
    fs::create_directories(out_dir);
    for (const auto& plan : plans) {
      const auto result = run_cmd(g_bin + " scan " + (corpus / (plan.tag + "_*.ir")).string() +
                                  " --tag " + plan.tag + " --out " + out_dir.string() +
                                  " --renaming-model " + g_renaming_model.string() +
                                  " --stringenc-model " + g_stringenc_model.string() +
                                  " --parallelism " + std::to_string(parallelism));
      require(result.exit_code == 0, plan.tag + " scan exited " +
                                         std::to_string(result.exit_code));
    }
    const auto agg = run_cmd(g_bin + " aggregate " + out_dir.string() + " --top-n 5");
    require(agg.exit_code == 0, "aggregate exited " + std::to_string(agg.exit_code));
    return agg.out;
  };

  const auto start = std::chrono::steady_clock::now();
  const std::string corpus_p4 = scan_all(g_tmp / "reports_p4", 4);
  require(seconds_since(start) < 30.0, "parallel scan+aggregate took longer than 30 s");

  const json report = json::parse(corpus_p4);
  for (const auto& plan : plans) {
    const TagTruth& t = truth.at(plan.tag);
    const json& tag = report.at("tags").at(plan.tag);
    require(tag.at("n_apps").get<int>() == 20, plan.tag + ": expected 20 apps");
    auto check_ratio = [&](const char* key, int positives) {
      const auto& tech = tag.at(key);
      require(tech.at("evaluated").get<int>() == 20,
              plan.tag + "/" + key + ": all 20 apps must be evaluated");
      require(tech.at("positive").get<int>() == positives,
              plan.tag + "/" + key + ": expected " + std::to_string(positives) +
                  " positives, got " + std::to_string(tech.at("positive").get<int>()));
      require(tech.at("ratio").get<double>() == positives / 20.0,
              plan.tag + "/" + key + ": ratio not exactly " +
                  std::to_string(positives / 20.0));
    };
    check_ratio("renaming", t.renaming);
    check_ratio("stringenc", t.stringenc);
    check_ratio("reflection", t.reflection_apps);
    check_ratio("packing", t.packing);

    const auto& rec = tag.at("reflection_recovery");
    require(rec.at("sites").get<int>() == t.sites,
            plan.tag + ": expected " + std::to_string(t.sites) + " sites");
    require(rec.at("recovered").get<int>() == t.recovered,
            plan.tag + ": expected " + std::to_string(t.recovered) + " recovered");
    const double expected_ratio =
        t.sites == 0 ? 0.0 : static_cast<double>(t.recovered) / t.sites;
    require(rec.at("ratio").get<double>() == expected_ratio,
            plan.tag + ": recovery ratio not exact");
  }

  // Identical output at parallelism 1 (timings aside).
  const std::string corpus_p1 = scan_all(g_tmp / "reports_p1", 1);
  require(corpus_p1 == corpus_p4, "corpus report differs between parallelism 1 and 4");
  for (const auto& entry : fs::directory_iterator(g_tmp / "reports_p4")) {
    const fs::path other = g_tmp / "reports_p1" / entry.path().filename();
    require(fs::exists(other), "missing report at parallelism 1: " + other.string());
    json a = json::parse(read_file(entry.path()));
    json b = json::parse(read_file(other));
    strip_timings(a);
    strip_timings(b);
    require(a == b, "report differs between parallelism levels: " +
                        entry.path().filename().string());
  }
}

// ---------------------------------------------------------------------------
// CLI surface checks from the command contracts.
// ---------------------------------------------------------------------------

void cli_exit_code_checks() {
  // Missing path list: usage error.
  require(run_cmd(g_bin + " scan").exit_code == 64, "scan with no paths must exit 64");

  // A corrupt archive is skipped and the run exits 2.
  const fs::path bad = g_tmp / "corrupt.apk";
  write_file(bad, "definitely not a zip");
  const auto scan = run_cmd(g_bin + " scan " + bad.string() + " --out " +
                            (g_tmp / "skip_out").string());
  require(scan.exit_code == 2, "corrupt input must exit 2, got " +
                                   std::to_string(scan.exit_code));
  const json summary = json::parse(scan.out);
  require(summary.at("skipped").size() == 1, "skip entry must be recorded");

  // Single-class manifest: data error.
  const fs::path single = g_tmp / "single.manifest";
  AppModel app;
  app.app_id = "only";
  write_file(g_tmp / "only.ir", dump_textual_ir(app));
  write_file(single, "t " + (g_tmp / "only.ir").string() + " plain\n");
  const auto train1 = run_cmd(g_bin + " train --technique renaming --corpus " +
                              single.string() + " --out " + (g_tmp / "m.json").string());
  require(train1.exit_code == 65, "single-class manifest must exit 65, got " +
                                      std::to_string(train1.exit_code));

  // Missing corpus file: no-input error.
  const auto train2 =
      run_cmd(g_bin + " train --technique renaming --corpus " +
              (g_tmp / "missing.manifest").string() + " --out " + (g_tmp / "m.json").string());
  require(train2.exit_code == 66, "missing manifest must exit 66, got " +
                                      std::to_string(train2.exit_code));

  // The slice debug command resolves the oracle fixture.
  const fs::path fixture = g_tmp / "smali_fixture.ir";
  write_file(fixture, kSmaliFixture);
  const auto slice = run_cmd(g_bin + " slice " + fixture.string() +
                             " com.sample.Probe probe 2 0");
  require(slice.exit_code == 0, "slice command failed");
  const json sliced = json::parse(slice.out);
  require(sliced.at("resolved_value").get<std::string>() == "android.os.SystemProperties",
          "slice command resolved the wrong value");

  // The signatures command prints the six bundled packers.
  const auto sigs = run_cmd(g_bin + " signatures");
  require(sigs.exit_code == 0, "signatures command failed");
  require(json::parse(sigs.out).at("packers").size() == 6,
          "signatures must list six packers");

  // Aggregating an empty directory yields an empty corpus report.
  fs::create_directories(g_tmp / "empty_reports");
  const auto agg = run_cmd(g_bin + " aggregate " + (g_tmp / "empty_reports").string());
  require(agg.exit_code == 0, "aggregate of empty dir must exit 0");
  require(json::parse(agg.out).at("tags").empty(), "empty dir must aggregate to no tags");
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::string(argv[i]) == "--bin") g_bin = argv[i + 1];
  }
  if (g_bin.empty()) {
    std::cerr << "usage: acceptance --bin <path-to-obfuscan>\n";
    return 2;
  }
  g_tmp = fs::temp_directory_path() /
          ("obfuscan_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(g_tmp);

  struct Criterion {
    const char* name;
    std::function<void()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"1. reflection oracle (forName/getMethod constants)", criterion_1_reflection_oracle},
      {"2. packing signature suite (6 packers, 22 signatures)", criterion_2_packing_signatures},
      {"3. control-flow signatures (straight-line + loop)", criterion_3_cf_signatures},
      {"4. renaming classifier, 400-app synthetic corpus", criterion_4_renaming_classifier},
      {"5. string-encryption classifier, 400-app synthetic corpus",
       criterion_5_stringenc_classifier},
      {"6. property suites (featurizer, round-trip, fuzz, slicer, aggregate, size-sim)",
       criterion_6_property_suites},
      {"7. end-to-end 60-app corpus with planted ground truth",
       criterion_7_end_to_end_corpus},
      {"8. CLI exit codes and debug commands", cli_exit_code_checks},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    try {
      c.fn();
      std::cout << "[PASS] " << c.name << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] " << c.name << ": " << e.what() << "\n";
    }
  }

  std::error_code ec;
  fs::remove_all(g_tmp, ec);
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
