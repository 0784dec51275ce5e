// Copyright 2026 The hybridmot Authors.
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

#include "hybridmot/imgcore.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <utility>

#include "hybridmot/error.hpp"

namespace hybridmot {

namespace {

constexpr std::array<double, 5> kBinomial = {1.0 / 16, 4.0 / 16, 6.0 / 16,
                                             4.0 / 16, 1.0 / 16};

// Reflect-101 border: -1 -> 1, n -> n-2.
int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

}  // namespace

GrayImage::GrayImage(int width, int height, float fill)
    : width_(width),
      height_(height),
      data_(std::size_t(std::max(width, 0)) * std::size_t(std::max(height, 0)),
            fill) {
  if (width < 0 || height < 0) {
    throw InvalidArgument("GrayImage: negative dimensions");
  }
}

GrayImage::GrayImage(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0 ||
      data_.size() != std::size_t(width) * std::size_t(height)) {
    throw InvalidArgument("GrayImage: data length does not match dimensions");
  }
}

GrayImage to_grayscale(const ColorImage& img) {
  if (img.rgb.size() != std::size_t(img.width) * std::size_t(img.height) * 3) {
    throw InvalidArgument("ColorImage: data length does not match dimensions");
  }
  std::vector<float> out(std::size_t(img.width) * std::size_t(img.height));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = img.rgb[3 * i];
    const double g = img.rgb[3 * i + 1];
    const double b = img.rgb[3 * i + 2];
    const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
    out[i] = static_cast<float>(std::clamp(luma, 0.0, 255.0));
  }
  return GrayImage(img.width, img.height, std::move(out));
}

GrayImage pyr_down(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  // Horizontal pass, only on the columns the decimation keeps.
  const int ow = w / 2;
  const int oh = h / 2;
  std::vector<double> horiz(std::size_t(ow) * std::size_t(h));
  for (int y = 0; y < h; ++y) {
    const float* src = img.row(y);
    for (int ox = 0; ox < ow; ++ox) {
      const int cx = 2 * ox;
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) {
        acc += kBinomial[std::size_t(k + 2)] * src[reflect101(cx + k, w)];
      }
      horiz[std::size_t(y) * ow + ox] = acc;
    }
  }
  std::vector<float> out(std::size_t(ow) * std::size_t(oh));
  for (int oy = 0; oy < oh; ++oy) {
    const int cy = 2 * oy;
    for (int ox = 0; ox < ow; ++ox) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) {
        acc += kBinomial[std::size_t(k + 2)] *
               horiz[std::size_t(reflect101(cy + k, h)) * ow + ox];
      }
      out[std::size_t(oy) * ow + ox] = static_cast<float>(acc);
    }
  }
  return GrayImage(ow, oh, std::move(out));
}

Pyramid build_pyramid(const GrayImage& img, int levels) {
  if (levels < 1) throw InvalidArgument("build_pyramid: levels must be >= 1");
  Pyramid pyr;
  pyr.levels.push_back(img);
  while (pyr.size() < levels) {
    const GrayImage& top = pyr.levels.back();
    if (top.width() < kMinPyramidSide || top.height() < kMinPyramidSide) break;
    pyr.levels.push_back(pyr_down(top));
  }
  return pyr;
}

double sample_bilinear(const GrayImage& img, double x, double y) {
  if (img.empty() || !(x >= 0.0) || !(y >= 0.0) ||
      x > img.width() - 1 || y > img.height() - 1) {
    std::ostringstream msg;
    msg << "sample_bilinear: (" << x << ", " << y << ") outside "
        << img.width() << "x" << img.height() << " image";
    throw SamplingOutOfBounds(msg.str());
  }
  return img.sample_unchecked(x, y);
}

}  // namespace hybridmot
