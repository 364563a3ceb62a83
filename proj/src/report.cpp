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

#include "obfuscan/report.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "obfuscan/errors.hpp"
#include "obfuscan/text_ir.hpp"

namespace obfuscan {

namespace {

using nlohmann::json;

json method_ref_to_json(const MethodRef& r) {
  return json{{"owner", r.owner_class}, {"name", r.name}, {"proto", r.proto}};
}

MethodRef method_ref_from_json(const json& j) {
  return MethodRef{j.at("owner").get<std::string>(), j.at("name").get<std::string>(),
                   j.at("proto").get<std::string>()};
}

json opt_string(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

std::optional<std::string> opt_string_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

json renaming_to_json(const RenamingDetection& d) {
  return json{
      {"verdict", d.verdict},
      {"score", d.score},
      {"name_count", d.name_count},
      {"policy",
       {{"short_name_ratio", d.policy.short_name_ratio},
        {"lexicographic_run", d.policy.lexicographic_run},
        {"non_ascii_ratio", d.policy.non_ascii_ratio},
        {"confusable_ratio", d.policy.confusable_ratio}}},
  };
}

RenamingDetection renaming_from_json(const json& j) {
  RenamingDetection d;
  d.verdict = j.at("verdict").get<bool>();
  d.score = j.at("score").get<double>();
  d.name_count = j.at("name_count").get<int>();
  const auto& p = j.at("policy");
  d.policy.short_name_ratio = p.at("short_name_ratio").get<double>();
  d.policy.lexicographic_run = p.at("lexicographic_run").get<bool>();
  d.policy.non_ascii_ratio = p.at("non_ascii_ratio").get<double>();
  d.policy.confusable_ratio = p.at("confusable_ratio").get<double>();
  return d;
}

json overload_to_json(const OverloadReport& r) {
  json groups = json::array();
  for (const auto& g : r.groups) {
    json pairs = json::array();
    for (const auto& p : g.pair_scores) {
      pairs.push_back(json{{"size_sim", p.size_sim},
                           {"invoke_overlap", p.invoke_overlap},
                           {"var_overlap", p.var_overlap},
                           {"same_return", p.same_return},
                           {"cfs_distance", p.cfs_distance}});
    }
    groups.push_back(json{{"class", g.class_name},
                          {"name", g.method_name},
                          {"arity_variants", g.arity_variants},
                          {"member_count", g.member_count},
                          {"suspicious", g.suspicious},
                          {"pair_scores", std::move(pairs)}});
  }
  return json{{"flagged", r.flagged}, {"groups", std::move(groups)}};
}

OverloadReport overload_from_json(const json& j) {
  OverloadReport r;
  r.flagged = j.at("flagged").get<bool>();
  for (const auto& gj : j.at("groups")) {
    OverloadGroup g;
    g.class_name = gj.at("class").get<std::string>();
    g.method_name = gj.at("name").get<std::string>();
    g.arity_variants = gj.at("arity_variants").get<int>();
    g.member_count = gj.at("member_count").get<int>();
    g.suspicious = gj.at("suspicious").get<bool>();
    for (const auto& pj : gj.at("pair_scores")) {
      PairFeature p;
      p.size_sim = pj.at("size_sim").get<double>();
      p.invoke_overlap = pj.at("invoke_overlap").get<double>();
      p.var_overlap = pj.at("var_overlap").get<double>();
      p.same_return = pj.at("same_return").get<int>();
      p.cfs_distance = pj.at("cfs_distance").get<double>();
      g.pair_scores.push_back(p);
    }
    r.groups.push_back(std::move(g));
  }
  return r;
}

json stringenc_to_json(const StringEncDetection& d) {
  json candidates = json::array();
  for (const auto& c : d.crypto_candidates) {
    candidates.push_back(json{{"method", method_ref_to_json(c.method)},
                              {"bitloop_ratio", c.bitloop_ratio},
                              {"jce_calls", c.jce_calls},
                              {"strop_count", c.strop_count},
                              {"enc_param_freq", c.enc_param_freq},
                              {"score", c.score}});
  }
  return json{{"verdict", d.verdict},
              {"score", d.score},
              {"string_count", d.string_count},
              {"crypto_candidates", std::move(candidates)}};
}

StringEncDetection stringenc_from_json(const json& j) {
  StringEncDetection d;
  d.verdict = j.at("verdict").get<bool>();
  d.score = j.at("score").get<double>();
  d.string_count = j.at("string_count").get<int>();
  for (const auto& cj : j.at("crypto_candidates")) {
    CryptoFnReport c;
    c.method = method_ref_from_json(cj.at("method"));
    c.bitloop_ratio = cj.at("bitloop_ratio").get<double>();
    c.jce_calls = cj.at("jce_calls").get<int>();
    c.strop_count = cj.at("strop_count").get<int>();
    c.enc_param_freq = cj.at("enc_param_freq").get<int>();
    c.score = cj.at("score").get<double>();
    d.crypto_candidates.push_back(std::move(c));
  }
  return d;
}

json reflection_to_json(const ReflectionSummary& r) {
  json sites = json::array();
  for (const auto& s : r.sites) {
    sites.push_back(json{{"container", method_ref_to_json(s.container)},
                         {"forname_idx", s.forname_idx},
                         {"getmethod_idx", s.getmethod_idx},
                         {"invoke_idx", s.invoke_idx},
                         {"recovered_class", opt_string(s.recovered_class)},
                         {"recovered_method", opt_string(s.recovered_method)},
                         {"status", std::string(to_string(s.status))},
                         {"partial_info", opt_string(s.partial_info)},
                         {"via_declared", s.via_declared}});
  }
  return json{{"uses_reflection", r.uses_reflection}, {"sites", std::move(sites)}};
}

ReflectionSummary reflection_from_json(const json& j) {
  ReflectionSummary r;
  r.uses_reflection = j.at("uses_reflection").get<bool>();
  for (const auto& sj : j.at("sites")) {
    ReflectionSite s;
    s.container = method_ref_from_json(sj.at("container"));
    s.forname_idx = sj.at("forname_idx").get<std::uint32_t>();
    s.getmethod_idx = sj.at("getmethod_idx").get<std::uint32_t>();
    s.invoke_idx = sj.at("invoke_idx").get<std::uint32_t>();
    s.recovered_class = opt_string_from(sj.at("recovered_class"));
    s.recovered_method = opt_string_from(sj.at("recovered_method"));
    const auto status = recovery_status_from_string(sj.at("status").get<std::string>());
    if (!status) throw Error("bad reflection status in report");
    s.status = *status;
    s.partial_info = opt_string_from(sj.at("partial_info"));
    s.via_declared = sj.at("via_declared").get<bool>();
    r.sites.push_back(std::move(s));
  }
  return r;
}

json packing_to_json(const PackingDetection& d) {
  json matches = json::array();
  for (const auto& m : d.matched_packers) {
    matches.push_back(json{{"packer_name", m.packer_name}, {"evidence", m.evidence}});
  }
  return json{{"verdict", d.verdict},
              {"matched_packers", std::move(matches)},
              {"heuristic_flags",
               {{"derived_application", d.heuristic_flags.derived_application},
                {"encrypted_asset", d.heuristic_flags.encrypted_asset},
                {"thin_wrapper", d.heuristic_flags.thin_wrapper}}}};
}

PackingDetection packing_from_json(const json& j) {
  PackingDetection d;
  d.verdict = j.at("verdict").get<bool>();
  for (const auto& mj : j.at("matched_packers")) {
    PackerMatch m;
    m.packer_name = mj.at("packer_name").get<std::string>();
    m.evidence = mj.at("evidence").get<std::vector<std::string>>();
    d.matched_packers.push_back(std::move(m));
  }
  const auto& h = j.at("heuristic_flags");
  d.heuristic_flags.derived_application = h.at("derived_application").get<bool>();
  d.heuristic_flags.encrypted_asset = h.at("encrypted_asset").get<bool>();
  d.heuristic_flags.thin_wrapper = h.at("thin_wrapper").get<bool>();
  return d;
}

class StageTimer {
 public:
  StageTimer(ScanReport& report, const char* stage)
      : report_(report), stage_(stage), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    report_.timings_ms[stage_] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  }

 private:
  ScanReport& report_;
  const char* stage_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

LoadedApp load_input_bytes(std::span<const std::uint8_t> bytes, const std::string& app_id,
                           const LibraryPrefixList& libs) {
  const std::string_view head(reinterpret_cast<const char*>(bytes.data()),
                              std::min<std::size_t>(bytes.size(), 4));
  if (head.starts_with("APP ") || head == "APP\n") {
    LoadedApp app;
    app.model = load_textual_ir(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    if (app.model.app_id.empty()) app.model.app_id = app_id;
    // Fixture LIB marks stay; prefix matches are added on top.
    for (auto& cls : app.model.classes) {
      if (!cls.is_library && libs.matches(cls.name)) cls.is_library = true;
    }
    return app;
  }
  auto parsed = parse_apk(bytes, libs, app_id);
  return LoadedApp{std::move(parsed.model), std::move(parsed.warnings)};
}

LoadedApp load_input_file(const std::filesystem::path& path, const LibraryPrefixList& libs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptArchive("cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_input_bytes(bytes, path.stem().string(), libs);
}

ScanReport scan_app(const LoadedApp& app, const Models& models, const ScanConfig& config,
                    const std::vector<PackerSignature>& signature_db) {
  ScanReport report;
  report.app_id = app.model.app_id;
  report.source_tag = config.source_tag;
  report.warnings = app.warnings;

  const bool no_code = std::any_of(app.warnings.begin(), app.warnings.end(),
                                   [](const std::string& w) {
                                     return w.starts_with(kNoDexWarning);
                                   });

  if (no_code) {
    report.warnings.push_back("renaming skipped: no bytecode");
    report.warnings.push_back("overloading skipped: no bytecode");
    report.warnings.push_back("stringenc skipped: no bytecode");
    report.warnings.push_back("reflection skipped: no bytecode");
  } else {
    {
      StageTimer t(report, "renaming");
      if (!models.renaming) {
        report.warnings.push_back("renaming skipped: no model loaded");
      } else {
        try {
          report.renaming = detect_renaming(app.model, *models.renaming);
        } catch (const Error& e) {
          report.warnings.push_back(std::string("renaming failed: ") + e.what());
        }
      }
    }
    {
      StageTimer t(report, "overloading");
      try {
        report.overloading = detect_overloading(app.model, config.overload);
      } catch (const Error& e) {
        report.warnings.push_back(std::string("overloading failed: ") + e.what());
      }
    }
    {
      StageTimer t(report, "stringenc");
      if (!models.stringenc) {
        report.warnings.push_back("stringenc skipped: no model loaded");
      } else {
        try {
          auto det = detect_string_encryption(app.model, *models.stringenc);
          if (det.verdict) {
            det.crypto_candidates =
                analyze_crypto_functions(app.model, config.crypto, &*models.stringenc);
          }
          report.stringenc = std::move(det);
        } catch (const Error& e) {
          report.warnings.push_back(std::string("stringenc failed: ") + e.what());
        }
      }
    }
    {
      StageTimer t(report, "reflection");
      try {
        ReflectionSummary summary;
        summary.sites = find_reflection_sites(app.model);
        summary.uses_reflection = !summary.sites.empty();
        report.reflection = std::move(summary);
      } catch (const Error& e) {
        report.warnings.push_back(std::string("reflection failed: ") + e.what());
      }
    }
  }
  {
    StageTimer t(report, "packing");
    try {
      report.packing = detect_packing(app.model, signature_db, config.packing);
    } catch (const Error& e) {
      report.warnings.push_back(std::string("packing failed: ") + e.what());
    }
  }
  return report;
}

nlohmann::json report_to_json(const ScanReport& report) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["app_id"] = report.app_id;
  j["source_tag"] = report.source_tag;
  j["renaming"] = report.renaming ? renaming_to_json(*report.renaming) : json(nullptr);
  j["overloading"] =
      report.overloading ? overload_to_json(*report.overloading) : json(nullptr);
  j["stringenc"] = report.stringenc ? stringenc_to_json(*report.stringenc) : json(nullptr);
  j["reflection"] =
      report.reflection ? reflection_to_json(*report.reflection) : json(nullptr);
  j["packing"] = report.packing ? packing_to_json(*report.packing) : json(nullptr);
  j["timings_ms"] = report.timings_ms;
  j["warnings"] = report.warnings;
  return j;
}

std::string report_to_string(const ScanReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

ScanReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.value("schema_version", -1) != kReportSchemaVersion) {
      throw Error("unsupported report schema version");
    }
    ScanReport r;
    r.app_id = j.at("app_id").get<std::string>();
    r.source_tag = j.at("source_tag").get<std::string>();
    if (!j.at("renaming").is_null()) r.renaming = renaming_from_json(j.at("renaming"));
    if (!j.at("overloading").is_null()) {
      r.overloading = overload_from_json(j.at("overloading"));
    }
    if (!j.at("stringenc").is_null()) r.stringenc = stringenc_from_json(j.at("stringenc"));
    if (!j.at("reflection").is_null()) {
      r.reflection = reflection_from_json(j.at("reflection"));
    }
    if (!j.at("packing").is_null()) r.packing = packing_from_json(j.at("packing"));
    r.timings_ms = j.at("timings_ms").get<std::map<std::string, std::int64_t>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

ScanReport report_from_string(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("report is not valid JSON");
  return report_from_json(j);
}

CorpusReport aggregate(const std::vector<ScanReport>& reports, int top_n) {
  CorpusReport corpus;
  corpus.top_n = top_n;
  for (const auto& r : reports) {
    TagStats& t = corpus.tags[r.source_tag];
    ++t.n_apps;
    if (r.renaming) {
      ++t.renaming.evaluated;
      if (r.renaming->verdict) ++t.renaming.positive;
    }
    if (r.stringenc) {
      ++t.stringenc.evaluated;
      if (r.stringenc->verdict) ++t.stringenc.positive;
    }
    if (r.reflection) {
      ++t.reflection.evaluated;
      if (r.reflection->uses_reflection) ++t.reflection.positive;
      for (const auto& site : r.reflection->sites) {
        ++t.reflection_sites;
        if (site.status == RecoveryStatus::Recovered) {
          ++t.reflection_recovered;
          if (site.recovered_class && site.recovered_method) {
            ++t.target_freq[*site.recovered_class + "." + *site.recovered_method];
          }
        }
      }
    }
    if (r.packing) {
      ++t.packing.evaluated;
      if (r.packing->verdict) ++t.packing.positive;
    }
  }
  return corpus;
}

std::vector<std::pair<std::string, int>> top_targets(const TagStats& stats, int top_n) {
  std::vector<std::pair<std::string, int>> all(stats.target_freq.begin(),
                                               stats.target_freq.end());
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (top_n >= 0 && all.size() > static_cast<std::size_t>(top_n)) {
    all.resize(static_cast<std::size_t>(top_n));
  }
  return all;
}

nlohmann::json corpus_to_json(const CorpusReport& corpus) {
  json tags = json::object();
  for (const auto& [tag, t] : corpus.tags) {
    auto tech = [](const TechniqueCount& c) {
      return json{{"positive", c.positive}, {"evaluated", c.evaluated}, {"ratio", c.ratio()}};
    };
    json targets = json::array();
    for (const auto& [fn, freq] : top_targets(t, corpus.top_n)) {
      targets.push_back(json{{"function", fn}, {"frequency", freq}});
    }
    tags[tag] = json{{"n_apps", t.n_apps},
                     {"renaming", tech(t.renaming)},
                     {"stringenc", tech(t.stringenc)},
                     {"reflection", tech(t.reflection)},
                     {"packing", tech(t.packing)},
                     {"reflection_recovery",
                      {{"sites", t.reflection_sites},
                       {"recovered", t.reflection_recovered},
                       {"ratio", t.recovery_ratio()}}},
                     {"top_reflection_targets", std::move(targets)}};
  }
  return json{{"schema_version", kReportSchemaVersion},
              {"top_n", corpus.top_n},
              {"tags", std::move(tags)}};
}

std::string corpus_to_string(const CorpusReport& corpus) {
  return corpus_to_json(corpus).dump(2) + "\n";
}

}  // namespace obfuscan
