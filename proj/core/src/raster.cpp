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

#include "qlimits/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "qlimits/error.hpp"
#include "qlimits/imgx.hpp"

namespace qlimits {

namespace {

// Reads the next whitespace-delimited PGM header token, skipping '#' comments.
std::string next_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const auto c = static_cast<unsigned char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

int parse_positive(const std::string& token, const std::filesystem::path& path) {
  require(!token.empty() && std::all_of(token.begin(), token.end(),
                                        [](char c) { return std::isdigit(c) != 0; }),
          ErrorCode::kFormatError, path.string() + ": malformed PGM header");
  const long v = std::stol(token);
  require(v > 0 && v < (1L << 24), ErrorCode::kFormatError,
          path.string() + ": PGM header value out of range");
  return static_cast<int>(v);
}

void check_side(int height, int width, const GridSpec& grid, const std::filesystem::path& path) {
  require(height == grid.side && width == grid.side, ErrorCode::kDimensionMismatch,
          path.string() + " is " + std::to_string(height) + "x" + std::to_string(width) +
              ", grid is " + std::to_string(grid.side) + "x" + std::to_string(grid.side));
}

Transmittance load_pgm(const std::string& bytes, const GridSpec& grid,
                       const std::filesystem::path& path) {
  std::size_t pos = 0;
  require(next_token(bytes, pos) == "P5", ErrorCode::kFormatError,
          path.string() + ": only binary P5 PGM is supported");
  const int width = parse_positive(next_token(bytes, pos), path);
  const int height = parse_positive(next_token(bytes, pos), path);
  const int maxval = parse_positive(next_token(bytes, pos), path);
  require(maxval <= 255, ErrorCode::kFormatError, path.string() + ": only 8-bit PGM is supported");
  ++pos;  // single whitespace byte after maxval
  check_side(height, width, grid, path);
  const std::size_t n = static_cast<std::size_t>(width) * height;
  require(bytes.size() >= pos + n, ErrorCode::kFormatError, path.string() + ": truncated PGM");

  Transmittance t{Grid(height, width)};
  for (std::size_t i = 0; i < n; ++i) {
    t.values.data()[i] = static_cast<unsigned char>(bytes[pos + i]) / static_cast<double>(maxval);
  }
  return t;
}

Transmittance load_imgx_frame(const std::filesystem::path& path, const GridSpec& grid,
                              int frame_index) {
  const ImgxFile file = [&] {
    try {
      return read_imgx(path);
    } catch (const Error& e) {
      fail(ErrorCode::kFormatError, e.what());
    }
  }();
  check_side(file.header.height, file.header.width, grid, path);
  require(frame_index >= 0 && frame_index < file.header.frames, ErrorCode::kFormatError,
          path.string() + ": frame index out of range");
  const std::size_t n = static_cast<std::size_t>(grid.pixel_count());
  const std::size_t offset = n * static_cast<std::size_t>(frame_index);

  Grid values(grid.side, grid.side);
  if (file.header.dtype == Dtype::kF32) {
    for (std::size_t i = 0; i < n; ++i) values.data()[i] = file.f32[offset + i];
    require(values.allFinite(), ErrorCode::kFormatError, path.string() + ": non-finite values");
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    if (lo < 0.0 || hi > 1.0) {
      values = hi > lo ? ((values - lo) / (hi - lo)).eval() : Grid::Zero(grid.side, grid.side);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) values.data()[i] = file.u32[offset + i];
    const double hi = values.maxCoeff();
    if (hi > 0.0) values /= hi;
  }
  return Transmittance{std::move(values)};
}

}  // namespace

Transmittance load_raster(const std::filesystem::path& path, const GridSpec& grid,
                          int frame_index) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kFormatError, "cannot read " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  require(!bytes.empty(), ErrorCode::kFormatError, path.string() + " is empty");
  if (bytes.front() == '{') return load_imgx_frame(path, grid, frame_index);
  return load_pgm(bytes, grid, path);
}

void write_pgm(const std::filesystem::path& path, const Grid& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIoError, "cannot open " + path.string());
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const double v = std::clamp(image.data()[i], 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  require(static_cast<bool>(out), ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace qlimits
