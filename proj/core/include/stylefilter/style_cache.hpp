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

#pragma once

#include <cstdint>
#include <filesystem>

#include "stylefilter/extractor.hpp"

namespace stylefilter {

struct StyleCacheHeader {
  Digest fingerprint{};
  std::uint64_t count = 0;
  std::uint32_t dim = 0;
};

// Binary little-endian layout: "SFSTYLE v1", 32-byte fingerprint, u64 count,
// u32 dim, then per record u16 id length, id bytes, dim x f32. Also writes a
// "<path>.idx" text sidecar mapping id to byte offset.
void write_style_cache(const std::filesystem::path& path, const StyleVectorSet& set);
std::string encode_style_cache(const StyleVectorSet& set);

// Throws CorruptError on a bad magic, truncation or trailing bytes.
StyleVectorSet read_style_cache(const std::filesystem::path& path);
StyleVectorSet decode_style_cache(std::string_view bytes);
StyleCacheHeader read_style_cache_header(const std::filesystem::path& path);

}  // namespace stylefilter
