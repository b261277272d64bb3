// Copyright 2026 The VPNG Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vpng/idx_io.hpp"

#include <fstream>

#include "vpng/errors.hpp"

namespace vpng {
namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::uint32_t read_be32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw TruncatedFile("idx: short read in " + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
      static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("idx: cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("idx: cannot write '" + path + "'");
  return out;
}

}  // namespace

IdxImages read_idx_images(const std::string& path) {
  std::ifstream in = open_in(path);
  const std::uint32_t magic = read_be32(in, path);
  if (magic != kImageMagic)
    throw BadMagic("idx: '" + path + "' is not an image file (magic " +
                   std::to_string(magic) + ")");
  IdxImages img;
  img.n = static_cast<int>(read_be32(in, path));
  img.rows = static_cast<int>(read_be32(in, path));
  img.cols = static_cast<int>(read_be32(in, path));
  require(img.n >= 0 && img.rows >= 1 && img.cols >= 1,
          "idx: bad image dimensions");
  const std::size_t count =
      static_cast<std::size_t>(img.n) * img.rows * img.cols;
  img.bytes.resize(count);
  in.read(reinterpret_cast<char*>(img.bytes.data()),
          static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    throw TruncatedFile("idx: image payload shorter than the header claims");
  return img;
}

void write_idx_images(const std::string& path, const IdxImages& images) {
  require(images.bytes.size() == static_cast<std::size_t>(images.n) *
                                     images.rows * images.cols,
          "idx: byte count does not match dimensions");
  std::ofstream out = open_out(path);
  write_be32(out, kImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.n));
  write_be32(out, static_cast<std::uint32_t>(images.rows));
  write_be32(out, static_cast<std::uint32_t>(images.cols));
  out.write(reinterpret_cast<const char*>(images.bytes.data()),
            static_cast<std::streamsize>(images.bytes.size()));
  if (!out) throw Error("idx: write failed for '" + path + "'");
}

std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
  std::ifstream in = open_in(path);
  const std::uint32_t magic = read_be32(in, path);
  if (magic != kLabelMagic)
    throw BadMagic("idx: '" + path + "' is not a label file (magic " +
                   std::to_string(magic) + ")");
  const std::uint32_t n = read_be32(in, path);
  std::vector<std::uint8_t> labels(n);
  in.read(reinterpret_cast<char*>(labels.data()),
          static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != labels.size())
    throw TruncatedFile("idx: label payload shorter than the header claims");
  return labels;
}

void write_idx_labels(const std::string& path,
                      const std::vector<std::uint8_t>& labels) {
  std::ofstream out = open_out(path);
  write_be32(out, kLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw Error("idx: write failed for '" + path + "'");
}

Eigen::MatrixXd binarize_images(const IdxImages& images) {
  const int d = images.rows * images.cols;
  Eigen::MatrixXd out(images.n, d);
  for (int i = 0; i < images.n; ++i)
    for (int j = 0; j < d; ++j)
      out(i, j) =
          images.bytes[static_cast<std::size_t>(i) * d + j] >= 128 ? 1.0 : 0.0;
  return out;
}

Eigen::MatrixXd downscale_to_8x8(const Eigen::MatrixXd& pixels, int rows,
                                 int cols) {
  require(rows >= 8 && cols >= 8, "idx: downscale needs at least 8x8 input");
  require(pixels.cols() == static_cast<Eigen::Index>(rows) * cols,
          "idx: pixel width does not match rows*cols");
  const int n = static_cast<int>(pixels.rows());
  Eigen::MatrixXd out(n, 64);
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < 8; ++r) {
      const int r0 = r * rows / 8;
      const int r1 = (r + 1) * rows / 8;
      for (int c = 0; c < 8; ++c) {
        const int c0 = c * cols / 8;
        const int c1 = (c + 1) * cols / 8;
        double sum = 0.0;
        for (int rr = r0; rr < r1; ++rr)
          for (int cc = c0; cc < c1; ++cc) sum += pixels(i, rr * cols + cc);
        const double mean = sum / ((r1 - r0) * (c1 - c0));
        out(i, r * 8 + c) = mean >= 0.5 ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

}  // namespace vpng
