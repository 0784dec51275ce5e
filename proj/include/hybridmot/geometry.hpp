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

#ifndef HYBRIDMOT_GEOMETRY_HPP_
#define HYBRIDMOT_GEOMETRY_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hybridmot {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Axis-aligned box as (left, top, width, height) in pixels.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  Point center() const { return {x + 0.5 * w, y + 0.5 * h}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

double iou(const BoundingBox& a, const BoundingBox& b);

// 4-DOF similarity x' = s R(theta) x + t. As a 2x3 matrix:
//   [ s cos -s sin tx ]
//   [ s sin  s cos ty ]
struct SimilarityTransform {
  double theta = 0.0;
  double scale = 1.0;
  double tx = 0.0;
  double ty = 0.0;

  static SimilarityTransform identity() { return {}; }
};

Point apply_transform(const SimilarityTransform& m, const Point& p);

// Exact transform taking src[0] -> dst[0] and src[1] -> dst[1]. Throws
// DegenerateSample when the source points coincide or the destination points
// collapse (zero scale).
SimilarityTransform solve_similarity_minimal(const Point (&src)[2],
                                             const Point (&dst)[2]);

// Least-squares similarity over all given correspondences (closed form about
// the centroids). Throws DegenerateSample when the sources have no spread.
SimilarityTransform fit_similarity_least_squares(std::span<const Point> src,
                                                 std::span<const Point> dst);

struct RansacParams {
  int iterations = 100;
  double inlier_threshold = 2.0;
  // 0 selects max(2, ceil(n / 2)) for n correspondences.
  int min_inliers = 0;
  std::uint64_t seed = 0;
};

struct RansacResult {
  SimilarityTransform transform;
  std::vector<bool> inliers;
  int inlier_count = 0;
};

// Two-point RANSAC with a least-squares refit of the best consensus set.
// Trial i draws from an RNG stream derived from (seed, i), so the outcome is
// independent of evaluation order. Throws NotEnoughPoints for fewer than two
// correspondences and NoConsensus when no trial reaches min_inliers.
RansacResult estimate_similarity_ransac(std::span<const Point> src,
                                        std::span<const Point> dst,
                                        const RansacParams& params);

// Maps the top-left and bottom-right corners and rebuilds an axis-aligned box
// from them.
BoundingBox warp_bbox(const BoundingBox& box, const SimilarityTransform& m);

}  // namespace hybridmot

#endif  // HYBRIDMOT_GEOMETRY_HPP_
