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

#ifndef HYBRIDMOT_FEATURES_HPP_
#define HYBRIDMOT_FEATURES_HPP_

#include <array>
#include <vector>

#include "hybridmot/geometry.hpp"
#include "hybridmot/imgcore.hpp"

namespace hybridmot {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double score = 0.0;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

// Offsets of the radius-3 Bresenham circle, clockwise from 12 o'clock.
inline constexpr std::array<std::array<int, 2>, 16> kFastCircle = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

// Pixels closer than this to any image edge are never tested.
inline constexpr int kFastBorder = 3;

struct FastParams {
  double threshold = 20.0;
  int arc = 9;
  bool nonmax = true;
};

// Segment-test corners in raster order (y, then x). A pixel is a corner when
// at least `arc` contiguous circle pixels are all brighter than I+t or all
// darker than I-t. Score is the largest sum of (|I_c - I| - t) over such a
// contiguous run.
std::vector<Keypoint> fast_detect(const GrayImage& img, double threshold,
                                  int arc, bool nonmax);

// Corner score at (x, y), 0 when the pixel is not a corner. The pixel must be
// at least kFastBorder from every edge.
double fast_score(const GrayImage& img, int x, int y, double threshold, int arc);

// Shrinks `box` by 10% per side, runs FAST inside it and keeps the `budget`
// best corners ordered by (score desc, y asc, x asc). When nothing is found,
// returns the box centre with score 0 so the flow stage always has a point.
std::vector<Keypoint> detect_in_box(const GrayImage& img, const BoundingBox& box,
                                    int budget, double threshold,
                                    int arc = 9);

}  // namespace hybridmot

#endif  // HYBRIDMOT_FEATURES_HPP_
