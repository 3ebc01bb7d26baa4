// Copyright 2026 The qlimits Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qlimits {

/// IMGX exchange format.
///
/// Line 1 is a compact JSON object terminated by a single '\n':
///
///   {"magic":"IMGX1","height":H,"width":W,"frames":F,"dtype":"f32le"}
///
/// followed by exactly H*W*F little-endian values ("f32le" IEEE-754 binary32
/// or "u32le" unsigned 32-bit), row-major within a frame and frame-major
/// overall. No padding and no trailing bytes.
enum class Dtype { kF32, kU32 };

std::string_view to_string(Dtype dtype) noexcept;

struct ImgxHeader {
  int height = 0;
  int width = 0;
  int frames = 0;
  Dtype dtype = Dtype::kF32;

  std::size_t value_count() const noexcept {
    return static_cast<std::size_t>(height) * width * frames;
  }
};

std::string format_imgx_header(const ImgxHeader& header);

/// Throws bad-magic, unsupported-dtype, or format-error.
ImgxHeader parse_imgx_header(std::string_view line);

struct ImgxFile {
  ImgxHeader header;
  std::vector<float> f32;           // filled when dtype is f32le
  std::vector<std::uint32_t> u32;   // filled when dtype is u32le
};

void write_imgx(const std::filesystem::path& path, ImgxHeader header,
                std::span<const float> values);
void write_imgx(const std::filesystem::path& path, ImgxHeader header,
                std::span<const std::uint32_t> values);

/// Streams values into an IMGX file frame by frame, for files too large to
/// hold in memory. Appending more values than the header promises, or the
/// wrong dtype, throws; close() throws size-mismatch when values are missing.
class ImgxWriter {
 public:
  ImgxWriter(const std::filesystem::path& path, ImgxHeader header);
  ImgxWriter(const ImgxWriter&) = delete;
  ImgxWriter& operator=(const ImgxWriter&) = delete;
  ~ImgxWriter();

  void append(std::span<const float> values);
  void append(std::span<const std::uint32_t> values);
  void close();

 private:
  void append_words(const std::uint32_t* words, std::size_t n, Dtype dtype);

  std::filesystem::path path_;
  ImgxHeader header_;
  std::ofstream out_;
  std::size_t written_ = 0;
};

/// Throws io-error if the file cannot be opened, size-mismatch if the payload
/// is shorter or longer than the header promises.
ImgxFile read_imgx(const std::filesystem::path& path);

}  // namespace qlimits
