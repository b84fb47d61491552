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

#include "stylefilter/image.hpp"

#include <png.h>

#include <cstring>
#include <string>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"

namespace stylefilter {

Image read_png(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_binary_file(path);
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()) == 0) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot decode " + path.string() + ": " + msg);
  }
  // Converts palette, gray and 16-bit inputs; gray is replicated to RGB.
  img.format = PNG_FORMAT_RGB;
  if (img.width == 0 || img.height == 0) {
    png_image_free(&img);
    throw IoError("cannot decode " + path.string() + ": zero-area image");
  }
  Image out(static_cast<int>(img.width), static_cast<int>(img.height));
  if (png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr) == 0) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot decode " + path.string() + ": " + msg);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (image.width <= 0 || image.height <= 0) throw ValidationError("cannot write zero-area image");
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (png_image_write_get_memory_size(img, size, 0, image.rgb.data(), 0, nullptr) == 0) {
    throw IoError("cannot encode " + path.string() + ": " + img.message);
  }
  std::string buf(size, '\0');
  if (png_image_write_to_memory(&img, buf.data(), &size, 0, image.rgb.data(), 0, nullptr) == 0) {
    throw IoError("cannot encode " + path.string() + ": " + img.message);
  }
  buf.resize(size);
  write_file_atomic(path, buf);
}

}  // namespace stylefilter
