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

#include "obfuscan/config.hpp"

#include <fstream>

#include <json.hpp>

#include "obfuscan/errors.hpp"

namespace obfuscan {

namespace {

// Curated prefixes of common third-party libraries. These identify code
// the developer did not write, which would otherwise pollute the
// developer-code detectors.
constexpr std::string_view kDefaultLibs = R"(# Common third-party library package prefixes, one per line.
android.support.
androidx.
kotlin.
kotlinx.
com.google.android.gms.
com.google.android.material.
com.google.firebase.
com.google.gson.
com.google.protobuf.
com.google.common.
com.android.vending.
com.android.billingclient.
org.apache.http.
org.apache.commons.
org.json.
org.xml.
org.w3c.
junit.
org.junit.
okhttp3.
okio.
retrofit2.
com.squareup.
io.reactivex.
rx.
com.fasterxml.jackson.
com.bumptech.glide.
com.nostra13.universalimageloader.
com.facebook.ads.
com.facebook.react.
com.unity3d.
com.crashlytics.
io.fabric.
com.flurry.
com.umeng.
com.tencent.mm.sdk.
com.alipay.
com.amazonaws.
com.airbnb.lottie.
org.greenrobot.
de.greenrobot.
com.github.
net.sqlcipher.
org.chromium.
)";

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path candidate(p);
  if (candidate.is_absolute() || base.empty()) return candidate;
  return base / candidate;
}

std::filesystem::path require_exists(std::filesystem::path p, const char* what) {
  if (!std::filesystem::exists(p)) {
    throw Error(std::string(what) + " does not exist: " + p.string());
  }
  return p;
}

}  // namespace

std::string_view default_library_prefixes_text() { return kDefaultLibs; }

ScanConfig parse_scan_config(const std::string& text, const std::filesystem::path& base_dir) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("config is not a JSON object");

  ScanConfig cfg;
  try {
    if (j.contains("models")) {
      const auto& m = j.at("models");
      if (m.contains("renaming")) {
        cfg.renaming_model_path = require_exists(
            resolve(base_dir, m.at("renaming").get<std::string>()), "renaming model");
      }
      if (m.contains("stringenc")) {
        cfg.stringenc_model_path = require_exists(
            resolve(base_dir, m.at("stringenc").get<std::string>()), "stringenc model");
      }
    }
    if (j.contains("libs")) {
      cfg.libs_path =
          require_exists(resolve(base_dir, j.at("libs").get<std::string>()), "library list");
    }
    if (j.contains("signatures")) {
      cfg.signature_db_path = require_exists(
          resolve(base_dir, j.at("signatures").get<std::string>()), "signature db");
    }
    if (j.contains("overload")) {
      const auto& o = j.at("overload");
      cfg.overload.composite_threshold =
          o.value("composite_threshold", cfg.overload.composite_threshold);
      cfg.overload.group_size_floor =
          o.value("group_size_floor", cfg.overload.group_size_floor);
    }
    if (j.contains("crypto")) {
      const auto& c = j.at("crypto");
      if (c.contains("weights")) {
        const auto w = c.at("weights").get<std::vector<double>>();
        if (w.size() != 4) throw Error("crypto.weights must have 4 entries");
        cfg.crypto.weight_bitloop = w[0];
        cfg.crypto.weight_jce = w[1];
        cfg.crypto.weight_strop = w[2];
        cfg.crypto.weight_enc_param = w[3];
      }
      cfg.crypto.threshold = c.value("threshold", cfg.crypto.threshold);
    }
    if (j.contains("packing")) {
      const auto& p = j.at("packing");
      cfg.packing.asset_entropy_min = p.value("asset_entropy_min", cfg.packing.asset_entropy_min);
      cfg.packing.asset_size_min = p.value("asset_size_min", cfg.packing.asset_size_min);
      cfg.packing.wrapper_max_instr =
          p.value("wrapper_max_instr", cfg.packing.wrapper_max_instr);
    }
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    cfg.top_n = j.value("top_n", cfg.top_n);
    cfg.source_tag = j.value("tag", cfg.source_tag);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

ScanConfig load_scan_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scan_config(text, path.parent_path());
}

}  // namespace obfuscan
