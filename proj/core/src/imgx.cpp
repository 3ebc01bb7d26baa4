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

#include "qlimits/imgx.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <nlohmann/json.hpp>

#include "qlimits/error.hpp"

namespace qlimits {

namespace {

constexpr std::string_view kMagic = "IMGX1";
constexpr std::size_t kMaxHeaderBytes = 4096;

void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFFu));
  out.push_back(static_cast<char>((v >> 8) & 0xFFu));
  out.push_back(static_cast<char>((v >> 16) & 0xFFu));
  out.push_back(static_cast<char>((v >> 24) & 0xFFu));
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

template <typename T>
void write_payload(const std::filesystem::path& path, const ImgxHeader& header,
                   std::span<const T> values) {
  require(values.size() == header.value_count(), ErrorCode::kSizeMismatch,
          "IMGX payload holds " + std::to_string(values.size()) + " values, header promises " +
              std::to_string(header.value_count()));
  std::string bytes = format_imgx_header(header);
  bytes.push_back('\n');
  bytes.reserve(bytes.size() + 4 * values.size());
  for (const T v : values) put_u32le(bytes, std::bit_cast<std::uint32_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIoError, "cannot open " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::kIoError, "write failed for " + path.string());
}

int header_int(const nlohmann::json& j, const char* key, int min_value) {
  require(j.contains(key) && j.at(key).is_number_integer(), ErrorCode::kFormatError,
          std::string("IMGX header field '") + key + "' missing or not an integer");
  const auto v = j.at(key).get<long long>();
  require(v >= min_value && v <= (1LL << 31) - 1, ErrorCode::kFormatError,
          std::string("IMGX header field '") + key + "' out of range");
  return static_cast<int>(v);
}

}  // namespace

std::string_view to_string(Dtype dtype) noexcept {
  return dtype == Dtype::kF32 ? "f32le" : "u32le";
}

std::string format_imgx_header(const ImgxHeader& header) {
  nlohmann::ordered_json j;
  j["magic"] = kMagic;
  j["height"] = header.height;
  j["width"] = header.width;
  j["frames"] = header.frames;
  j["dtype"] = to_string(header.dtype);
  return j.dump();
}

ImgxHeader parse_imgx_header(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  require(j.is_object(), ErrorCode::kFormatError, "IMGX header is not a JSON object");
  require(j.contains("magic") && j.at("magic").is_string(), ErrorCode::kBadMagic,
          "IMGX header has no magic");
  const auto magic = j.at("magic").get<std::string>();
  require(magic == kMagic, ErrorCode::kBadMagic, "unexpected IMGX magic '" + magic + "'");

  ImgxHeader h;
  h.height = header_int(j, "height", 1);
  h.width = header_int(j, "width", 1);
  h.frames = header_int(j, "frames", 0);
  require(j.contains("dtype") && j.at("dtype").is_string(), ErrorCode::kFormatError,
          "IMGX header has no dtype");
  const auto dtype = j.at("dtype").get<std::string>();
  if (dtype == "f32le") {
    h.dtype = Dtype::kF32;
  } else if (dtype == "u32le") {
    h.dtype = Dtype::kU32;
  } else {
    fail(ErrorCode::kUnsupportedDtype, "IMGX dtype '" + dtype + "' is not supported");
  }
  return h;
}

void write_imgx(const std::filesystem::path& path, ImgxHeader header,
                std::span<const float> values) {
  header.dtype = Dtype::kF32;
  write_payload(path, header, values);
}

void write_imgx(const std::filesystem::path& path, ImgxHeader header,
                std::span<const std::uint32_t> values) {
  header.dtype = Dtype::kU32;
  write_payload(path, header, values);
}

ImgxWriter::ImgxWriter(const std::filesystem::path& path, ImgxHeader header)
    : path_(path), header_(header), out_(path, std::ios::binary | std::ios::trunc) {
  require(static_cast<bool>(out_), ErrorCode::kIoError, "cannot open " + path.string());
  const std::string line = format_imgx_header(header_) + "\n";
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
}

ImgxWriter::~ImgxWriter() = default;

void ImgxWriter::append_words(const std::uint32_t* words, std::size_t n, Dtype dtype) {
  require(dtype == header_.dtype, ErrorCode::kUnsupportedDtype,
          "IMGX writer dtype is " + std::string(to_string(header_.dtype)));
  require(written_ + n <= header_.value_count(), ErrorCode::kSizeMismatch,
          path_.string() + ": more values appended than the header promises");
  std::string bytes;
  bytes.reserve(4 * n);
  for (std::size_t i = 0; i < n; ++i) put_u32le(bytes, words[i]);
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out_), ErrorCode::kIoError, "write failed for " + path_.string());
  written_ += n;
}

void ImgxWriter::append(std::span<const float> values) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) words[i] = std::bit_cast<std::uint32_t>(values[i]);
  append_words(words.data(), words.size(), Dtype::kF32);
}

void ImgxWriter::append(std::span<const std::uint32_t> values) {
  append_words(values.data(), values.size(), Dtype::kU32);
}

void ImgxWriter::close() {
  require(written_ == header_.value_count(), ErrorCode::kSizeMismatch,
          path_.string() + ": " + std::to_string(written_) + " values written, header promises " +
              std::to_string(header_.value_count()));
  out_.close();
  require(!out_.fail(), ErrorCode::kIoError, "close failed for " + path_.string());
}

ImgxFile read_imgx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIoError, "cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  const auto newline = bytes.find('\n');
  require(newline != std::string::npos && newline < kMaxHeaderBytes, ErrorCode::kFormatError,
          path.string() + ": no IMGX header line");
  ImgxFile file;
  file.header = parse_imgx_header(std::string_view(bytes).substr(0, newline));

  const std::size_t payload = bytes.size() - newline - 1;
  const std::size_t expected = 4 * file.header.value_count();
  require(payload == expected, ErrorCode::kSizeMismatch,
          path.string() + ": payload has " + std::to_string(payload) + " bytes, header implies " +
              std::to_string(expected));

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + newline + 1);
  const std::size_t n = file.header.value_count();
  if (file.header.dtype == Dtype::kF32) {
    file.f32.resize(n);
    for (std::size_t i = 0; i < n; ++i) file.f32[i] = std::bit_cast<float>(get_u32le(p + 4 * i));
  } else {
    file.u32.resize(n);
    for (std::size_t i = 0; i < n; ++i) file.u32[i] = get_u32le(p + 4 * i);
  }
  return file;
}

}  // namespace qlimits
