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

#include "qlimits/metrics.hpp"

#include "qlimits/error.hpp"

namespace qlimits {

namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

// Summed-area table with a zero first row and column.
Eigen::ArrayXXd integral(const Grid& g) {
  Eigen::ArrayXXd s = Eigen::ArrayXXd::Zero(g.rows() + 1, g.cols() + 1);
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      s(r + 1, c + 1) = g(r, c) + s(r, c + 1) + s(r + 1, c) - s(r, c);
    }
  }
  return s;
}

double box(const Eigen::ArrayXXd& s, Eigen::Index r, Eigen::Index c, int w) {
  return s(r + w, c + w) - s(r, c + w) - s(r + w, c) + s(r, c);
}

}  // namespace

double ssim(const Grid& a, const Grid& b, int window) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kDimensionMismatch,
          "SSIM inputs differ in size");
  require(window >= 1 && window % 2 == 1, ErrorCode::kInvalidArgument, "SSIM window must be odd");
  require(window <= a.rows() && window <= a.cols(), ErrorCode::kInvalidArgument,
          "SSIM window is larger than the image");

  const Eigen::ArrayXXd sa = integral(a);
  const Eigen::ArrayXXd sb = integral(b);
  const Eigen::ArrayXXd saa = integral(a.square());
  const Eigen::ArrayXXd sbb = integral(b.square());
  const Eigen::ArrayXXd sab = integral(a * b);
  const double inv = 1.0 / (static_cast<double>(window) * window);

  double total = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index r = 0; r + window <= a.rows(); ++r) {
    for (Eigen::Index c = 0; c + window <= a.cols(); ++c) {
      const double ma = box(sa, r, c, window) * inv;
      const double mb = box(sb, r, c, window) * inv;
      const double va = box(saa, r, c, window) * inv - ma * ma;
      const double vb = box(sbb, r, c, window) * inv - mb * mb;
      const double cov = box(sab, r, c, window) * inv - ma * mb;
      total += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
               ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double gdl(const Grid& a, const Grid& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kDimensionMismatch,
          "GDL inputs differ in size");
  const Grid d = a - b;
  double total = 0.0;
  Eigen::Index count = 0;
  if (d.cols() > 1) {
    total += (d.rightCols(d.cols() - 1) - d.leftCols(d.cols() - 1)).square().sum();
    count += d.rows() * (d.cols() - 1);
  }
  if (d.rows() > 1) {
    total += (d.bottomRows(d.rows() - 1) - d.topRows(d.rows() - 1)).square().sum();
    count += (d.rows() - 1) * d.cols();
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

}  // namespace qlimits
