// Copyright 2026 The Style Filter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stylefilter/style_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"

namespace fs = std::filesystem;

namespace stylefilter {

namespace {

constexpr std::string_view kMagic = "SFSTYLE v1";
constexpr std::size_t kHeaderSize = kMagic.size() + 32 + 8 + 4;

template <class T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(static_cast<std::uint64_t>(v) >> (8 * i) & 0xFF));
  }
}

template <class T>
T get_le(std::string_view in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw CorruptError("style cache truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  return static_cast<T>(v);
}

StyleCacheHeader decode_header(std::string_view bytes) {
  if (bytes.size() < kHeaderSize || bytes.substr(0, kMagic.size()) != kMagic) {
    throw CorruptError("style cache corrupted: missing SFSTYLE v1 header");
  }
  StyleCacheHeader h;
  std::memcpy(h.fingerprint.data(), bytes.data() + kMagic.size(), 32);
  std::size_t pos = kMagic.size() + 32;
  h.count = get_le<std::uint64_t>(bytes, pos);
  h.dim = get_le<std::uint32_t>(bytes, pos);
  return h;
}

std::string encode(const StyleVectorSet& set, std::string* index) {
  if (set.values.rows() != set.ids.size() || (set.values.rows() > 0 && set.values.cols() != set.dim)) {
    throw ValidationError("style cache: ids and vectors disagree");
  }
  std::string out(kMagic);
  out.append(reinterpret_cast<const char*>(set.fingerprint.data()), set.fingerprint.size());
  put_le<std::uint64_t>(out, set.ids.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim));
  for (std::size_t i = 0; i < set.ids.size(); ++i) {
    const std::string& id = set.ids[i];
    if (id.size() > std::numeric_limits<std::uint16_t>::max()) throw ValidationError("style cache: id too long");
    if (index) *index += id + "\t" + std::to_string(out.size()) + "\n";
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out += id;
    for (std::size_t j = 0; j < set.dim; ++j) {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(set.values(i, j))));
    }
  }
  return out;
}

}  // namespace

std::string encode_style_cache(const StyleVectorSet& set) { return encode(set, nullptr); }

void write_style_cache(const fs::path& path, const StyleVectorSet& set) {
  std::string index = "# id\toffset\n";
  const std::string bytes = encode(set, &index);
  write_file_atomic(path, bytes);
  fs::path idx = path;
  idx += ".idx";
  write_file_atomic(idx, index);
}

StyleVectorSet decode_style_cache(std::string_view bytes) {
  const StyleCacheHeader h = decode_header(bytes);
  StyleVectorSet set;
  set.fingerprint = h.fingerprint;
  set.dim = h.dim;
  std::size_t pos = kHeaderSize;
  // Each record carries at least its length prefix and dim floats.
  const std::size_t min_record = 2 + 4 * static_cast<std::size_t>(h.dim);
  if (h.count > (bytes.size() - pos) / min_record) throw CorruptError("style cache truncated");
  set.values = Matrix(h.count, h.dim);
  set.ids.reserve(h.count);
  for (std::uint64_t i = 0; i < h.count; ++i) {
    const auto len = get_le<std::uint16_t>(bytes, pos);
    if (pos + len > bytes.size()) throw CorruptError("style cache truncated");
    set.ids.emplace_back(bytes.substr(pos, len));
    pos += len;
    for (std::uint32_t j = 0; j < h.dim; ++j) {
      set.values(i, j) = std::bit_cast<float>(get_le<std::uint32_t>(bytes, pos));
    }
  }
  if (pos != bytes.size()) throw CorruptError("style cache has trailing bytes");
  return set;
}

StyleVectorSet read_style_cache(const fs::path& path) {
  return decode_style_cache(read_text_file(path));
}

StyleCacheHeader read_style_cache_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string buf(kHeaderSize, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  return decode_header(buf);
}

}  // namespace stylefilter
