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
#include <string>
#include <vector>

namespace obfuscan {

struct ZipEntry {
  std::string path;
  std::uint16_t method = 0;  // 0 = stored, 8 = deflate
  std::uint32_t compressed_size = 0;
  std::uint32_t uncompressed_size = 0;
  std::uint32_t local_header_offset = 0;
};

/// Minimal read-only zip-container view over an in-memory buffer. Only
/// the stored and deflate methods are supported; everything else is
/// reported per entry when its data is requested. Throws CorruptArchive
/// when the end-of-central-directory record or the central directory
/// itself cannot be parsed.
class ZipReader {
 public:
  static ZipReader open(std::span<const std::uint8_t> bytes);

  const std::vector<ZipEntry>& entries() const { return entries_; }

  /// Decompressed entry content. Throws CorruptArchive for this entry
  /// (unsupported method, bad local header, inflate failure).
  std::vector<std::uint8_t> read(const ZipEntry& entry) const;

  /// Raw stored bytes of the entry, whatever the method; used as an
  /// entropy fallback when read() fails.
  std::span<const std::uint8_t> raw(const ZipEntry& entry) const;

 private:
  explicit ZipReader(std::span<const std::uint8_t> bytes) : data_(bytes) {}

  std::span<const std::uint8_t> data_;
  std::vector<ZipEntry> entries_;
};

}  // namespace obfuscan
