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

#include <gtest/gtest.h>

#include "obfuscan/detect_stringenc.hpp"
#include "obfuscan/errors.hpp"
#include "support/synthetic.hpp"

namespace obfuscan {
namespace {

using testing::Rng;

LinearModel train_string_model(Rng& rng, int apps_per_class = 40) {
  std::vector<Sample> samples;
  for (int i = 0; i < apps_per_class; ++i) {
    samples.push_back({featurize(testing::plain_strings(rng, 30), Charset::ascii()), "plain"});
    samples.push_back(
        {featurize(testing::encrypted_strings(rng, 30), Charset::ascii()), "encrypted"});
  }
  return train(samples, Hyper{}, "encrypted");
}

AppModel app_with_strings(Rng& rng, const std::vector<std::string>& strings) {
  AppModel app = testing::make_natural_app(rng, "s");
  testing::inject_strings(app, strings);
  return app;
}

TEST(DetectStringEnc, PlainVersusGarbledLiterals) {
  Rng rng(21);
  const auto model = train_string_model(rng);

  const auto plain = app_with_strings(rng, {"hello world", "open file"});
  const auto mangled = app_with_strings(rng, {"@^@#\\x `1 m*7 ", "zR#1!p0)(qL=#"});
  EXPECT_FALSE(detect_string_encryption(plain, model).verdict);
  EXPECT_TRUE(detect_string_encryption(mangled, model).verdict);
}

TEST(DetectStringEnc, ZeroStringsIsNegative) {
  Rng rng(22);
  const auto model = train_string_model(rng, 10);
  AppModel app = testing::make_natural_app(rng, "empty");
  const auto det = detect_string_encryption(app, model);
  EXPECT_FALSE(det.verdict);
  EXPECT_EQ(det.string_count, 0);
}

TEST(DetectStringEnc, VerdictInvariantUnderDuplication) {
  Rng rng(23);
  const auto model = train_string_model(rng, 10);
  const auto strings = testing::encrypted_strings(rng, 12);
  const auto once = app_with_strings(rng, strings);
  auto doubled_strings = strings;
  doubled_strings.insert(doubled_strings.end(), strings.begin(), strings.end());
  const auto twice = app_with_strings(rng, doubled_strings);

  const auto a = detect_string_encryption(once, model);
  const auto b = detect_string_encryption(twice, model);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_NEAR(a.score, b.score, 1e-9);  // frequencies unchanged
  EXPECT_EQ(b.string_count, 2 * a.string_count);
}

TEST(DetectStringEnc, LibraryStringsIgnored) {
  Rng rng(24);
  const auto model = train_string_model(rng, 10);
  AppModel app;
  ClassDef lib;
  lib.name = "androidx.X";
  lib.superclass = "java.lang.Object";
  lib.is_library = true;
  MethodDef m;
  m.name = "f";
  m.proto = "()V";
  m.register_count = 1;
  Instr cs;
  cs.op = OpcodeClass::ConstString;
  cs.operands = {0};
  cs.string_lit = "zR#1!p0)(qL=#";
  Instr ret;
  ret.op = OpcodeClass::Return;
  ret.index = 1;
  m.instructions = {cs, ret};
  lib.methods.push_back(m);
  app.classes.push_back(lib);
  const auto det = detect_string_encryption(app, model);
  EXPECT_EQ(det.string_count, 0);
  EXPECT_FALSE(det.verdict);
}

TEST(DetectStringEnc, RejectsIdentifierModel) {
  LinearModel model;
  model.charset_id = CharsetId::Identifier;
  EXPECT_THROW(detect_string_encryption(AppModel{}, model), ModelCharsetMismatch);
}

TEST(DictionaryWords, MostlyClassifiedPlain) {
  // Per-string classification over plain dictionary words: at least 95%
  // must come out plain under the synthetic-corpus model.
  Rng rng(25);
  const auto model = train_string_model(rng);
  int plain = 0, total = 0;
  for (const auto& word : testing::wordlist()) {
    if (word.size() < 3) continue;
    ++total;
    if (!classify_string_encrypted(word, model)) ++plain;
  }
  EXPECT_GE(static_cast<double>(plain) / total, 0.95);
}

// --- crypto function analysis ---

MethodDef make_method(std::string name, std::string proto, std::vector<Instr> instrs,
                      std::uint16_t regs = 8) {
  MethodDef m;
  m.name = std::move(name);
  m.proto = std::move(proto);
  m.register_count = regs;
  m.instructions = std::move(instrs);
  for (std::size_t i = 0; i < m.instructions.size(); ++i) {
    m.instructions[i].index = static_cast<std::uint32_t>(i);
  }
  return m;
}

Instr bare(OpcodeClass cls, std::vector<std::uint16_t> regs = {}) {
  Instr i;
  i.op = cls;
  i.operands = std::move(regs);
  return i;
}

Instr call(OpcodeClass cls, std::vector<std::uint16_t> regs, MethodRef ref) {
  Instr i = bare(cls, std::move(regs));
  i.method_ref = std::move(ref);
  return i;
}

TEST(CryptoAnalysis, BitloopRatioCountsBitOpsAndBackwardEdges) {
  std::vector<Instr> body;
  for (int i = 0; i < 4; ++i) body.push_back(bare(OpcodeClass::BitOp, {0, 1, 2}));
  body.push_back(bare(OpcodeClass::ArithOp, {0, 1, 2}));
  body.push_back(bare(OpcodeClass::ArithOp, {0, 1, 2}));
  body.push_back(bare(OpcodeClass::ArithOp, {0, 1, 2}));
  body.push_back(bare(OpcodeClass::ArithOp, {0, 1, 2}));
  Instr back = bare(OpcodeClass::Goto);
  back.branch_target = 0;
  body.push_back(back);
  body.push_back(bare(OpcodeClass::Return));

  AppModel app;
  ClassDef cls;
  cls.name = "a.C";
  cls.superclass = "java.lang.Object";
  cls.methods.push_back(make_method("d", "()V", std::move(body)));
  app.classes.push_back(std::move(cls));

  CryptoConfig cfg;
  cfg.threshold = 0.0;  // keep every method in the report
  const auto reports = analyze_crypto_functions(app, cfg, nullptr);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_DOUBLE_EQ(reports[0].bitloop_ratio, 0.5);  // (4 bit + 1 backward) / 10
}

TEST(CryptoAnalysis, JceAndStringOpCounts) {
  AppModel app;
  ClassDef cls;
  cls.name = "a.C";
  cls.superclass = "java.lang.Object";
  cls.methods.push_back(make_method(
      "d", "()V",
      {call(OpcodeClass::InvokeVirtual, {0, 1},
            {"javax.crypto.Cipher", "doFinal", "([B)[B"}),
       call(OpcodeClass::InvokeVirtual, {0, 1},
            {"java.lang.StringBuilder", "append",
             "(Ljava/lang/String;)Ljava/lang/StringBuilder;"}),
       call(OpcodeClass::InvokeStatic, {0}, {"java.security.MessageDigest", "getInstance",
                                             "(Ljava/lang/String;)Ljava/security/MessageDigest;"}),
       bare(OpcodeClass::Return)}));
  app.classes.push_back(std::move(cls));

  CryptoConfig cfg;
  cfg.threshold = 0.0;
  const auto reports = analyze_crypto_functions(app, cfg, nullptr);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].jce_calls, 2);
  EXPECT_EQ(reports[0].strop_count, 1);
}

TEST(CryptoAnalysis, EncryptedParamFrequencyRanksDecoder) {
  Rng rng(31);
  const auto model = train_string_model(rng);

  AppModel app;
  ClassDef cls;
  cls.name = "a.C";
  cls.superclass = "java.lang.Object";

  // The decrypt-looking target: bit ops in a loop over its input.
  {
    std::vector<Instr> body;
    for (int i = 0; i < 3; ++i) body.push_back(bare(OpcodeClass::BitOp, {0, 0, 1}));
    Instr back = bare(OpcodeClass::Branch, {0});
    back.branch_target = 0;
    body.push_back(back);
    body.push_back(bare(OpcodeClass::Return, {0}));
    cls.methods.push_back(
        make_method("d", "(Ljava/lang/String;)Ljava/lang/String;", std::move(body)));
  }
  // An innocuous helper, never fed constants.
  cls.methods.push_back(make_method("helper", "()V", {bare(OpcodeClass::Return)}));

  // Five call sites passing high-entropy constants into d().
  const MethodRef d_ref{"a.C", "d", "(Ljava/lang/String;)Ljava/lang/String;"};
  std::vector<Instr> caller_body;
  for (int i = 0; i < 5; ++i) {
    Instr cs = bare(OpcodeClass::ConstString, {1});
    cs.string_lit = testing::random_printable(rng);
    caller_body.push_back(cs);
    caller_body.push_back(call(OpcodeClass::InvokeStatic, {1}, d_ref));
    caller_body.push_back(bare(OpcodeClass::MoveResult, {2}));
  }
  caller_body.push_back(bare(OpcodeClass::Return));
  cls.methods.push_back(make_method("caller", "()V", std::move(caller_body)));
  app.classes.push_back(std::move(cls));

  CryptoConfig cfg;
  cfg.threshold = 0.0;
  const auto reports = analyze_crypto_functions(app, cfg, &model);
  ASSERT_GE(reports.size(), 2u);
  EXPECT_EQ(reports[0].method.name, "d");  // top-ranked candidate
  EXPECT_EQ(reports[0].enc_param_freq, 5);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    EXPECT_LE(reports[i].score, reports[0].score);
  }
}

TEST(CryptoAnalysis, DeterministicOrderScoreThenRef) {
  AppModel app;
  ClassDef cls;
  cls.name = "a.C";
  cls.superclass = "java.lang.Object";
  // Two methods with identical feature profiles: the tie breaks on the
  // method ref, lexicographically.
  for (const char* name : {"beta", "alpha"}) {
    cls.methods.push_back(make_method(
        name, "()V",
        {bare(OpcodeClass::BitOp, {0, 1, 2}), bare(OpcodeClass::Return)}));
  }
  app.classes.push_back(std::move(cls));
  CryptoConfig cfg;
  cfg.threshold = 0.0;
  const auto reports = analyze_crypto_functions(app, cfg, nullptr);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].method.name, "alpha");
  EXPECT_EQ(reports[1].method.name, "beta");
}

TEST(CryptoAnalysis, CountsAreBruteForceReproducible) {
  Rng rng(33);
  AppModel app = testing::make_natural_app(rng, "x");
  CryptoConfig cfg;
  cfg.threshold = 0.0;
  for (const auto& r : analyze_crypto_functions(app, cfg, nullptr)) {
    EXPECT_GE(r.bitloop_ratio, 0.0);
    EXPECT_LE(r.bitloop_ratio, 1.0);
    EXPECT_GE(r.jce_calls, 0);
    EXPECT_GE(r.strop_count, 0);
    EXPECT_GE(r.enc_param_freq, 0);
  }
}

}  // namespace
}  // namespace obfuscan
