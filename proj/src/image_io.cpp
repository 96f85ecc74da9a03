/*
 * Copyright 2026 The skelact authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "skelact/image_io.hpp"

#include <array>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "skelact/common.hpp"

namespace skelact {
namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature = {137, 80, 78, 71, 13, 10, 26, 10};

std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t crc = 0) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t n = 0; n < 256; ++n) {
      std::uint32_t c = n;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[n] = c;
    }
    return t;
  }();
  crc ^= 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

std::uint32_t adler32(const std::uint8_t* data, std::size_t len) {
  std::uint32_t a = 1, b = 0;
  for (std::size_t i = 0; i < len; ++i) {
    a = (a + data[i]) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
  put_be32(out, static_cast<std::uint32_t>(payload.size()));
  std::vector<std::uint8_t> body(type, type + 4);
  body.insert(body.end(), payload.begin(), payload.end());
  out.insert(out.end(), body.begin(), body.end());
  put_be32(out, crc32(body.data(), body.size()));
}

}  // namespace

void write_png_rgb8(const ImageU8& img, const std::filesystem::path& path) {
  if (img.height < 1 || img.width < 1)
    throw DataError("write_png_rgb8: empty image for " + path.string());

  // Filter byte 0 (None) per row.
  const std::size_t row_bytes = static_cast<std::size_t>(img.width) * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(img.height) * (row_bytes + 1));
  for (int r = 0; r < img.height; ++r) {
    raw.push_back(0);
    const std::uint8_t* row = img.data.data() + static_cast<std::size_t>(r) * row_bytes;
    raw.insert(raw.end(), row, row + row_bytes);
  }

  // zlib stream with stored (uncompressed) deflate blocks.
  std::vector<std::uint8_t> zstream;
  zstream.push_back(0x78);
  zstream.push_back(0x01);
  std::size_t offset = 0;
  while (offset < raw.size()) {
    const std::size_t len = std::min<std::size_t>(65535, raw.size() - offset);
    const bool last = offset + len == raw.size();
    zstream.push_back(last ? 1 : 0);
    zstream.push_back(static_cast<std::uint8_t>(len & 0xFF));
    zstream.push_back(static_cast<std::uint8_t>(len >> 8));
    zstream.push_back(static_cast<std::uint8_t>(~len & 0xFF));
    zstream.push_back(static_cast<std::uint8_t>((~len >> 8) & 0xFF));
    zstream.insert(zstream.end(), raw.begin() + offset, raw.begin() + offset + len);
    offset += len;
  }
  put_be32(zstream, adler32(raw.data(), raw.size()));

  std::vector<std::uint8_t> file(kPngSignature.begin(), kPngSignature.end());
  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(img.width));
  put_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  append_chunk(file, "IHDR", ihdr);
  append_chunk(file, "IDAT", zstream);
  append_chunk(file, "IEND", {});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(file.data()), static_cast<std::streamsize>(file.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

struct ByteReader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;
  const std::string& origin;

  std::uint8_t u8() {
    if (pos >= bytes.size()) throw DataError("truncated PNG: " + origin);
    return bytes[pos++];
  }
  std::uint32_t be32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  void take(std::uint8_t* dst, std::size_t n) {
    if (pos + n > bytes.size()) throw DataError("truncated PNG: " + origin);
    std::memcpy(dst, bytes.data() + pos, n);
    pos += n;
  }
};

std::uint8_t paeth(std::uint8_t a, std::uint8_t b, std::uint8_t c) {
  const int p = static_cast<int>(a) + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

}  // namespace

ImageU8 read_png_rgb8(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  const std::string origin = path.string();
  ByteReader r{bytes, 0, origin};

  for (std::uint8_t expected : kPngSignature)
    if (r.u8() != expected) throw DataError("not a PNG file: " + origin);

  int width = 0, height = 0;
  std::vector<std::uint8_t> idat;
  bool done = false;
  while (!done) {
    const std::uint32_t len = r.be32();
    char type[5] = {};
    r.take(reinterpret_cast<std::uint8_t*>(type), 4);
    std::vector<std::uint8_t> payload(len);
    if (len) r.take(payload.data(), len);
    r.be32();  // chunk CRC; the zlib checksum below covers the pixel data
    const std::string t(type);
    if (t == "IHDR") {
      if (len != 13) throw DataError("bad IHDR in " + origin);
      width = (payload[0] << 24) | (payload[1] << 16) | (payload[2] << 8) | payload[3];
      height = (payload[4] << 24) | (payload[5] << 16) | (payload[6] << 8) | payload[7];
      if (payload[8] != 8 || payload[9] != 2 || payload[12] != 0)
        throw DataError("unsupported PNG flavor (need 8-bit RGB, non-interlaced): " + origin);
    } else if (t == "IDAT") {
      idat.insert(idat.end(), payload.begin(), payload.end());
    } else if (t == "IEND") {
      done = true;
    }
  }
  if (width < 1 || height < 1 || idat.size() < 6) throw DataError("malformed PNG: " + origin);

  // zlib: header, stored deflate blocks, adler32.
  if ((idat[0] & 0x0F) != 8) throw DataError("unsupported zlib method in " + origin);
  std::size_t pos = 2;
  std::vector<std::uint8_t> raw;
  for (;;) {
    if (pos >= idat.size()) throw DataError("truncated zlib stream in " + origin);
    const std::uint8_t header = idat[pos++];
    if ((header & 0x06) != 0)
      throw DataError("compressed PNG not supported (this tool writes stored blocks): " + origin);
    if (pos + 4 > idat.size()) throw DataError("truncated zlib stream in " + origin);
    const std::size_t len = idat[pos] | (idat[pos + 1] << 8);
    pos += 4;  // LEN + NLEN
    if (pos + len > idat.size()) throw DataError("truncated zlib stream in " + origin);
    raw.insert(raw.end(), idat.begin() + pos, idat.begin() + pos + len);
    pos += len;
    if (header & 1) break;
  }
  if (pos + 4 > idat.size() ||
      adler32(raw.data(), raw.size()) !=
          ((static_cast<std::uint32_t>(idat[pos]) << 24) |
           (static_cast<std::uint32_t>(idat[pos + 1]) << 16) |
           (static_cast<std::uint32_t>(idat[pos + 2]) << 8) |
           static_cast<std::uint32_t>(idat[pos + 3])))
    throw DataError("zlib checksum mismatch in " + origin);

  const std::size_t row_bytes = static_cast<std::size_t>(width) * 3;
  if (raw.size() != static_cast<std::size_t>(height) * (row_bytes + 1))
    throw DataError("pixel payload size mismatch in " + origin);

  ImageU8 img(height, width);
  std::vector<std::uint8_t> prev(row_bytes, 0);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * (row_bytes + 1);
    const std::uint8_t filter = src[0];
    std::uint8_t* dst = img.data.data() + static_cast<std::size_t>(y) * row_bytes;
    for (std::size_t i = 0; i < row_bytes; ++i) {
      const std::uint8_t x = src[1 + i];
      const std::uint8_t left = i >= 3 ? dst[i - 3] : 0;
      const std::uint8_t up = prev[i];
      const std::uint8_t up_left = i >= 3 ? prev[i - 3] : 0;
      switch (filter) {
        case 0: dst[i] = x; break;
        case 1: dst[i] = static_cast<std::uint8_t>(x + left); break;
        case 2: dst[i] = static_cast<std::uint8_t>(x + up); break;
        case 3: dst[i] = static_cast<std::uint8_t>(x + ((left + up) >> 1)); break;
        case 4: dst[i] = static_cast<std::uint8_t>(x + paeth(left, up, up_left)); break;
        default: throw DataError("bad row filter in " + origin);
      }
    }
    std::memcpy(prev.data(), dst, row_bytes);
  }
  return img;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  for (const auto& e : entries) {
    out << e.image_path << ' ' << e.action << ' ' << e.subject << ' ' << e.episode << ' '
        << (e.split_role.empty() ? "unassigned" : e.split_role);
    if (!e.variant.empty()) out << ' ' << e.variant;
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    ManifestEntry e;
    if (!(fields >> e.image_path >> e.action >> e.subject >> e.episode >> e.split_role))
      throw DataError("bad manifest line " + std::to_string(line_no) + " in " + path.string());
    fields >> e.variant;  // optional
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace skelact
