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

#include "obfuscan/zip_reader.hpp"

#include <zlib.h>

#include <cstring>

#include "obfuscan/errors.hpp"

namespace obfuscan {

namespace {

constexpr std::uint32_t kEocdSig = 0x06054b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::size_t kEocdMinSize = 22;
constexpr std::size_t kMaxCommentLen = 0xFFFF;

std::uint16_t rd16(std::span<const std::uint8_t> d, std::size_t off) {
  return static_cast<std::uint16_t>(d[off] | (d[off + 1] << 8));
}

std::uint32_t rd32(std::span<const std::uint8_t> d, std::size_t off) {
  return static_cast<std::uint32_t>(d[off]) | (static_cast<std::uint32_t>(d[off + 1]) << 8) |
         (static_cast<std::uint32_t>(d[off + 2]) << 16) |
         (static_cast<std::uint32_t>(d[off + 3]) << 24);
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> in,
                                      std::size_t expected_out) {
  std::vector<std::uint8_t> out(expected_out);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    throw CorruptArchive("inflate init failed");
  }
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = out.size() - zs.avail_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected_out) {
    throw CorruptArchive("deflate stream corrupt");
  }
  return out;
}

}  // namespace

ZipReader ZipReader::open(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEocdMinSize) throw CorruptArchive("not a zip: too small");

  // Scan backwards for the end-of-central-directory record; it sits after
  // the archive comment, which is at most 64 KiB.
  const std::size_t scan_floor =
      bytes.size() > kEocdMinSize + kMaxCommentLen ? bytes.size() - kEocdMinSize - kMaxCommentLen : 0;
  std::size_t eocd = std::string::npos;
  for (std::size_t i = bytes.size() - kEocdMinSize + 1; i-- > scan_floor;) {
    if (rd32(bytes, i) == kEocdSig) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw CorruptArchive("not a zip: no end record");

  const std::uint16_t entry_count = rd16(bytes, eocd + 10);
  const std::uint32_t cd_size = rd32(bytes, eocd + 12);
  const std::uint32_t cd_offset = rd32(bytes, eocd + 16);
  if (static_cast<std::size_t>(cd_offset) + cd_size > bytes.size()) {
    throw CorruptArchive("truncated central directory");
  }

  ZipReader zip(bytes);
  std::size_t pos = cd_offset;
  const std::size_t cd_end = cd_offset + cd_size;
  for (std::uint16_t i = 0; i < entry_count; ++i) {
    if (pos + 46 > cd_end || rd32(bytes, pos) != kCentralSig) {
      throw CorruptArchive("truncated central directory");
    }
    ZipEntry e;
    e.method = rd16(bytes, pos + 10);
    e.compressed_size = rd32(bytes, pos + 20);
    e.uncompressed_size = rd32(bytes, pos + 24);
    const std::uint16_t name_len = rd16(bytes, pos + 28);
    const std::uint16_t extra_len = rd16(bytes, pos + 30);
    const std::uint16_t comment_len = rd16(bytes, pos + 32);
    e.local_header_offset = rd32(bytes, pos + 42);
    if (pos + 46 + name_len > cd_end) throw CorruptArchive("truncated central directory");
    e.path.assign(reinterpret_cast<const char*>(bytes.data() + pos + 46), name_len);
    if (e.path.empty()) throw CorruptArchive("entry with empty path");
    pos += 46u + name_len + extra_len + comment_len;
    zip.entries_.push_back(std::move(e));
  }
  return zip;
}

std::span<const std::uint8_t> ZipReader::raw(const ZipEntry& entry) const {
  const std::size_t lho = entry.local_header_offset;
  if (lho + 30 > data_.size() || rd32(data_, lho) != kLocalSig) {
    throw CorruptArchive(entry.path + ": bad local header");
  }
  const std::uint16_t name_len = rd16(data_, lho + 26);
  const std::uint16_t extra_len = rd16(data_, lho + 28);
  const std::size_t data_off = lho + 30u + name_len + extra_len;
  if (data_off + entry.compressed_size > data_.size()) {
    throw CorruptArchive(entry.path + ": entry data truncated");
  }
  return data_.subspan(data_off, entry.compressed_size);
}

std::vector<std::uint8_t> ZipReader::read(const ZipEntry& entry) const {
  const auto payload = raw(entry);
  switch (entry.method) {
    case 0:
      if (entry.compressed_size != entry.uncompressed_size) {
        throw CorruptArchive(entry.path + ": stored size mismatch");
      }
      return {payload.begin(), payload.end()};
    case 8:
      return inflate_raw(payload, entry.uncompressed_size);
    default:
      throw CorruptArchive(entry.path + ": unsupported compression method " +
                           std::to_string(entry.method));
  }
}

}  // namespace obfuscan
