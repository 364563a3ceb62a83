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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "obfuscan/config.hpp"
#include "obfuscan/errors.hpp"
#include "obfuscan/report.hpp"
#include "obfuscan/text_ir.hpp"

namespace {

using namespace obfuscan;
using nlohmann::json;

// sysexits-style codes, plus 2 for a partially-skipped scan.
constexpr int kExitOk = 0;
constexpr int kExitPartial = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitIoError = 74;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

LibraryPrefixList load_libs(const ScanConfig& cfg) {
  if (cfg.libs_path) return load_library_prefixes(*cfg.libs_path);
  return parse_library_prefixes(default_library_prefixes_text());
}

std::vector<PackerSignature> load_signatures(const ScanConfig& cfg) {
  if (cfg.signature_db_path) return load_signature_db(*cfg.signature_db_path);
  return parse_signature_db(default_signature_db_text());
}

Models load_models(const ScanConfig& cfg) {
  Models models;
  if (cfg.renaming_model_path) models.renaming = load_model(*cfg.renaming_model_path);
  if (cfg.stringenc_model_path) models.stringenc = load_model(*cfg.stringenc_model_path);
  return models;
}

struct ScanOptions {
  std::vector<std::string> paths;
  std::string config_path;
  std::string out_dir = ".";
  std::string tag;
  std::string libs_path, renaming_model, stringenc_model, signatures_path;
  unsigned parallelism = 0;
};

ScanConfig resolve_scan_config(const ScanOptions& opt) {
  ScanConfig cfg;
  std::string config_path = opt.config_path;
  if (config_path.empty()) {
    if (const char* env = std::getenv("OBFUSCAN_CONFIG")) config_path = env;
  }
  if (!config_path.empty()) cfg = load_scan_config(config_path);
  auto path_or = [](const std::string& flag, std::optional<std::filesystem::path>& slot) {
    if (!flag.empty()) slot = std::filesystem::path(flag);
  };
  path_or(opt.libs_path, cfg.libs_path);
  path_or(opt.renaming_model, cfg.renaming_model_path);
  path_or(opt.stringenc_model, cfg.stringenc_model_path);
  path_or(opt.signatures_path, cfg.signature_db_path);
  if (!opt.tag.empty()) cfg.source_tag = opt.tag;
  if (opt.parallelism > 0) cfg.parallelism = opt.parallelism;
  if (cfg.parallelism == 0) {
    cfg.parallelism = std::max(1u, std::thread::hardware_concurrency());
  }
  return cfg;
}

int run_scan(const ScanOptions& opt) {
  const ScanConfig cfg = resolve_scan_config(opt);
  const LibraryPrefixList libs = load_libs(cfg);
  const auto signature_db = load_signatures(cfg);
  const Models models = load_models(cfg);

  std::filesystem::create_directories(opt.out_dir);

  // Output names are fixed up-front so results do not depend on worker
  // interleaving.
  std::vector<std::filesystem::path> out_paths(opt.paths.size());
  {
    std::map<std::string, int> stem_uses;
    for (std::size_t i = 0; i < opt.paths.size(); ++i) {
      std::string stem = std::filesystem::path(opt.paths[i]).stem().string();
      const int n = stem_uses[stem]++;
      if (n > 0) stem += "_" + std::to_string(n + 1);
      out_paths[i] = std::filesystem::path(opt.out_dir) / (stem + ".report.json");
    }
  }

  struct Outcome {
    bool skipped = false;
    std::string reason;
  };
  std::vector<Outcome> outcomes(opt.paths.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= opt.paths.size()) return;
      try {
        const LoadedApp app = load_input_file(opt.paths[i], libs);
        const ScanReport report = scan_app(app, models, cfg, signature_db);
        std::ofstream out(out_paths[i], std::ios::binary);
        if (!out) throw Error("cannot write " + out_paths[i].string());
        out << report_to_string(report);
      } catch (const Error& e) {
        outcomes[i] = Outcome{true, e.what()};
      }
    }
  };

  const unsigned n_workers =
      std::min<unsigned>(cfg.parallelism, static_cast<unsigned>(opt.paths.size()));
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < n_workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  json skipped = json::array();
  json written = json::array();
  for (std::size_t i = 0; i < opt.paths.size(); ++i) {
    if (outcomes[i].skipped) {
      skipped.push_back(json{{"path", opt.paths[i]}, {"reason", outcomes[i].reason}});
      std::cerr << "skipped " << opt.paths[i] << ": " << outcomes[i].reason << "\n";
    } else {
      written.push_back(out_paths[i].string());
    }
  }
  std::cout << json{{"reports", written},
                    {"scanned", written.size()},
                    {"skipped", skipped}}
                   .dump(2)
            << "\n";
  return skipped.empty() ? kExitOk : kExitPartial;
}

struct TrainOptions {
  std::string technique;
  std::string corpus;
  std::string out;
  std::string libs_path;
  std::string positive_label;
  double lambda = 1e-4;
  std::uint32_t epochs = 50;
  std::uint64_t seed = 42;
  double holdout = 0.25;
};

int run_train(const TrainOptions& opt) {
  const bool renaming = opt.technique == "renaming";
  const std::string positive =
      !opt.positive_label.empty() ? opt.positive_label
                                  : (renaming ? "obfuscated" : "encrypted");
  LibraryPrefixList libs = opt.libs_path.empty()
                               ? parse_library_prefixes(default_library_prefixes_text())
                               : load_library_prefixes(opt.libs_path);

  std::vector<Sample> samples;
  const std::string manifest = read_file(opt.corpus);
  std::size_t line_no = 0, start = 0;
  while (start < manifest.size()) {
    auto nl = manifest.find('\n', start);
    if (nl == std::string::npos) nl = manifest.size();
    std::string line = manifest.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::istringstream fields(line);
    std::string tag, path, label;
    fields >> tag >> path >> label;
    if (path.empty() || label.empty()) {
      throw Error("manifest line " + std::to_string(line_no) +
                  ": expected '<tag> <path> <label>'");
    }
    const LoadedApp app = load_input_file(path, libs);
    Sample s;
    s.label = label;
    if (renaming) {
      s.vec = featurize(collect_renaming_names(app.model), Charset::identifier());
    } else {
      s.vec = featurize(collect_app_strings(app.model), Charset::ascii());
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw SingleClass("manifest lists no samples");

  // Deterministic split: seeded shuffle, holdout drawn from the tail.
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(opt.seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  const auto n_holdout = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(samples.size()) - 1.0,
                       std::llround(opt.holdout * static_cast<double>(samples.size()))));
  std::vector<Sample> train_set, holdout_set;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < order.size() - n_holdout ? train_set : holdout_set).push_back(samples[order[k]]);
  }

  const LinearModel model =
      train(train_set, Hyper{opt.lambda, opt.epochs, opt.seed}, positive);
  save_model(model, opt.out);

  std::size_t correct = 0, pos_total = 0, neg_total = 0, fn = 0, fp = 0;
  for (const auto& s : holdout_set) {
    const bool truth = s.label == positive;
    const bool got = predict(model, s.vec).positive;
    if (truth) {
      ++pos_total;
      if (!got) ++fn;
    } else {
      ++neg_total;
      if (got) ++fp;
    }
    if (truth == got) ++correct;
  }
  json out{{"model", opt.out},
           {"label_positive", positive},
           {"n_train", train_set.size()},
           {"n_holdout", holdout_set.size()},
           {"holdout_accuracy",
            holdout_set.empty() ? 0.0
                                : static_cast<double>(correct) / holdout_set.size()},
           {"holdout_fn_rate",
            pos_total == 0 ? 0.0 : static_cast<double>(fn) / pos_total},
           {"holdout_fp_rate",
            neg_total == 0 ? 0.0 : static_cast<double>(fp) / neg_total}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

struct AggregateOptions {
  std::string report_dir;
  std::string out;
  int top_n = 5;
};

int run_aggregate(const AggregateOptions& opt) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::exists(opt.report_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(opt.report_dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
  } else {
    throw Error("report directory does not exist: " + opt.report_dir);
  }
  std::sort(files.begin(), files.end());  // deterministic fold order

  std::vector<ScanReport> reports;
  for (const auto& f : files) {
    try {
      reports.push_back(report_from_string(read_file(f)));
    } catch (const Error& e) {
      std::cerr << "ignoring " << f.string() << ": " << e.what() << "\n";
    }
  }
  const CorpusReport corpus = aggregate(reports, opt.top_n);
  const std::string text = corpus_to_string(corpus);
  if (!opt.out.empty()) {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) return kExitIoError;
    out << text;
  }
  std::cout << text;
  return kExitOk;
}

struct SliceOptions {
  std::string ir_file;
  std::string class_name;
  std::string method_name;
  std::uint32_t idx = 0;
  std::uint32_t reg = 0;
};

int run_slice(const SliceOptions& opt) {
  const AppModel app = load_textual_ir(read_file(opt.ir_file));
  const ClassDef* cls = nullptr;
  for (const auto& c : app.classes) {
    if (c.name == opt.class_name) {
      cls = &c;
      break;
    }
  }
  if (!cls) throw Error("class not found: " + opt.class_name);

  // Accept "name" or "name:proto" to disambiguate overloads.
  std::string want_name = opt.method_name, want_proto;
  if (const auto colon = opt.method_name.find(':'); colon != std::string::npos) {
    want_name = opt.method_name.substr(0, colon);
    want_proto = opt.method_name.substr(colon + 1);
  }
  const MethodDef* method = nullptr;
  for (const auto& m : cls->methods) {
    if (m.name == want_name && (want_proto.empty() || m.proto == want_proto)) {
      method = &m;
      break;
    }
  }
  if (!method) throw Error("method not found: " + opt.method_name);
  if (opt.idx >= method->instructions.size()) throw Error("instruction index out of range");
  if (opt.reg >= method->register_count) throw Error("register out of range");

  const SliceState s = slice_and_resolve(*method, opt.idx, static_cast<std::uint16_t>(opt.reg));
  json out{{"criterion_register", s.criterion_register},
           {"use_idx", s.use_idx},
           {"slice", s.slice},
           {"resolved_value", s.resolved_value ? json(*s.resolved_value) : json(nullptr)},
           {"partial_info", s.partial_info ? json(*s.partial_info) : json(nullptr)}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int run_signatures(const std::string& db_path) {
  const auto db = db_path.empty() ? parse_signature_db(default_signature_db_text())
                                  : load_signature_db(db_path);
  json packers = json::array();
  for (const auto& p : db) {
    packers.push_back(json{{"packer_name", p.packer_name},
                           {"file_signatures", p.file_signatures},
                           {"code_signatures", p.code_signatures}});
  }
  std::cout << json{{"packers", packers}}.dump(2) << "\n";
  return kExitOk;
}

bool is_missing_file_error(const std::string& message) {
  return message.find("cannot open") != std::string::npos ||
         message.find("does not exist") != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"obfuscan: static detection of Android obfuscation techniques"};
  cli.require_subcommand(1);

  ScanOptions scan_opt;
  auto* scan_cmd = cli.add_subcommand("scan", "scan APKs or textual-IR fixtures");
  scan_cmd->add_option("paths", scan_opt.paths, "inputs to scan")->required();
  scan_cmd->add_option("--config", scan_opt.config_path, "config file (or $OBFUSCAN_CONFIG)");
  scan_cmd->add_option("--out", scan_opt.out_dir, "report output directory");
  scan_cmd->add_option("--tag", scan_opt.tag, "source tag recorded in reports");
  scan_cmd->add_option("--libs", scan_opt.libs_path, "library prefix list file");
  scan_cmd->add_option("--renaming-model", scan_opt.renaming_model, "renaming model file");
  scan_cmd->add_option("--stringenc-model", scan_opt.stringenc_model, "stringenc model file");
  scan_cmd->add_option("--signatures", scan_opt.signatures_path, "packer signature db file");
  scan_cmd->add_option("--parallelism", scan_opt.parallelism, "worker count (default: CPUs)");

  TrainOptions train_opt;
  auto* train_cmd = cli.add_subcommand("train", "train a technique model from a manifest");
  train_cmd->add_option("--technique", train_opt.technique, "renaming|stringenc")
      ->required()
      ->check(CLI::IsMember({"renaming", "stringenc"}));
  train_cmd->add_option("--corpus", train_opt.corpus, "manifest: <tag> <path> <label>")
      ->required();
  train_cmd->add_option("--out", train_opt.out, "model output path")->required();
  train_cmd->add_option("--libs", train_opt.libs_path, "library prefix list file");
  train_cmd->add_option("--positive-label", train_opt.positive_label,
                        "label treated as positive");
  train_cmd->add_option("--lambda", train_opt.lambda, "regularization strength");
  train_cmd->add_option("--epochs", train_opt.epochs, "training epochs");
  train_cmd->add_option("--seed", train_opt.seed, "shuffle/split seed");
  train_cmd->add_option("--holdout", train_opt.holdout, "holdout fraction");

  AggregateOptions agg_opt;
  auto* agg_cmd = cli.add_subcommand("aggregate", "fold a report directory into corpus stats");
  agg_cmd->add_option("report_dir", agg_opt.report_dir, "directory of scan reports")
      ->required();
  agg_cmd->add_option("--out", agg_opt.out, "also write the corpus report here");
  agg_cmd->add_option("--top-n", agg_opt.top_n, "reflection target list size");

  SliceOptions slice_opt;
  auto* slice_cmd = cli.add_subcommand("slice", "debug: backward slice in an IR fixture");
  slice_cmd->add_option("ir_file", slice_opt.ir_file)->required();
  slice_cmd->add_option("class", slice_opt.class_name)->required();
  slice_cmd->add_option("method", slice_opt.method_name, "name or name:proto")->required();
  slice_cmd->add_option("idx", slice_opt.idx, "use-site instruction index")->required();
  slice_cmd->add_option("reg", slice_opt.reg, "criterion register")->required();

  std::string sig_db_path;
  auto* sig_cmd = cli.add_subcommand("signatures", "print the loaded packer signature db");
  sig_cmd->add_option("--db", sig_db_path, "signature db file");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return cli.exit(e);  // --help
    cli.exit(e);
    return kExitUsage;
  }

  try {
    if (scan_cmd->parsed()) return run_scan(scan_opt);
    if (train_cmd->parsed()) return run_train(train_opt);
    if (agg_cmd->parsed()) return run_aggregate(agg_opt);
    if (slice_cmd->parsed()) return run_slice(slice_opt);
    if (sig_cmd->parsed()) return run_signatures(sig_db_path);
  } catch (const SingleClass& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const BadModelFile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const BadSignatureDb& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_missing_file_error(e.what()) ? kExitNoInput : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitUsage;
}
