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

#ifndef HYBRIDMOT_IMGCORE_HPP_
#define HYBRIDMOT_IMGCORE_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

namespace hybridmot {

// Row-major grayscale image with intensities in [0, 255] stored as float so
// that repeated sampling in the flow solver does not requantize.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, float fill = 0.0f);
  // Takes ownership of `data`; size must be width * height.
  GrayImage(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  float at(int x, int y) const { return data_[index(x, y)]; }
  float& at(int x, int y) { return data_[index(x, y)]; }

  const float* row(int y) const { return data_.data() + std::size_t(y) * width_; }
  const std::vector<float>& data() const { return data_; }

  // Bilinear sample without bounds checks; caller guarantees
  // 0 <= x <= width-1 and 0 <= y <= height-1.
  double sample_unchecked(double x, double y) const {
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    if (x0 >= width_ - 1) x0 = width_ > 1 ? width_ - 2 : 0;
    if (y0 >= height_ - 1) y0 = height_ > 1 ? height_ - 2 : 0;
    const double fx = x - x0;
    const double fy = y - y0;
    const int x1 = width_ > 1 ? x0 + 1 : x0;
    const int y1 = height_ > 1 ? y0 + 1 : y0;
    const double top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
    const double bottom = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
    return (1.0 - fy) * top + fy * bottom;
  }

 private:
  std::size_t index(int x, int y) const {
    return std::size_t(y) * std::size_t(width_) + std::size_t(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// Interleaved 8-bit RGB.
struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
};

// Level 0 is full resolution; level L has dims (w >> L, h >> L).
struct Pyramid {
  std::vector<GrayImage> levels;

  int size() const { return static_cast<int>(levels.size()); }
  const GrayImage& level(int l) const { return levels[std::size_t(l)]; }
};

// A level is only decimated further while it is at least this many pixels
// wide and high.
inline constexpr int kMinPyramidSide = 16;

// BT.601 luma.
GrayImage to_grayscale(const ColorImage& img);

// Separable [1 4 6 4 1]/16 blur followed by 2x decimation per level.
Pyramid build_pyramid(const GrayImage& img, int levels);

// One reduce step (blur + decimate). Exposed for tests.
GrayImage pyr_down(const GrayImage& img);

// Throws SamplingOutOfBounds outside [0, w-1] x [0, h-1].
double sample_bilinear(const GrayImage& img, double x, double y);

}  // namespace hybridmot

#endif  // HYBRIDMOT_IMGCORE_HPP_
