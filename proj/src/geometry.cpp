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

#include "hybridmot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hybridmot/error.hpp"

namespace hybridmot {

namespace {

double normalize_angle(double theta) {
  // atan2 yields [-pi, pi]; the closed end belongs to +pi.
  if (theta <= -std::numbers::pi) theta += 2.0 * std::numbers::pi;
  return theta;
}

SimilarityTransform from_linear(double a, double b, double tx, double ty) {
  SimilarityTransform m;
  m.scale = std::hypot(a, b);
  m.theta = normalize_angle(std::atan2(b, a));
  m.tx = tx;
  m.ty = ty;
  return m;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double residual(const SimilarityTransform& m, const Point& s, const Point& d) {
  const Point p = apply_transform(m, s);
  return std::hypot(p.x - d.x, p.y - d.y);
}

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Point apply_transform(const SimilarityTransform& m, const Point& p) {
  const double c = std::cos(m.theta) * m.scale;
  const double s = std::sin(m.theta) * m.scale;
  return {c * p.x - s * p.y + m.tx, s * p.x + c * p.y + m.ty};
}

SimilarityTransform solve_similarity_minimal(const Point (&src)[2],
                                             const Point (&dst)[2]) {
  const double sx = src[1].x - src[0].x;
  const double sy = src[1].y - src[0].y;
  const double dx = dst[1].x - dst[0].x;
  const double dy = dst[1].y - dst[0].y;
  const double norm = sx * sx + sy * sy;
  if (norm == 0.0) {
    throw DegenerateSample("solve_similarity_minimal: coincident source points");
  }
  // q = (dst1 - dst0) / (src1 - src0) as complex numbers; q = s e^{i theta}.
  const double a = (dx * sx + dy * sy) / norm;
  const double b = (dy * sx - dx * sy) / norm;
  if (a == 0.0 && b == 0.0) {
    throw DegenerateSample("solve_similarity_minimal: zero scale");
  }
  const double cx_s = 0.5 * (src[0].x + src[1].x);
  const double cy_s = 0.5 * (src[0].y + src[1].y);
  const double cx_d = 0.5 * (dst[0].x + dst[1].x);
  const double cy_d = 0.5 * (dst[0].y + dst[1].y);
  return from_linear(a, b, cx_d - (a * cx_s - b * cy_s),
                     cy_d - (b * cx_s + a * cy_s));
}

SimilarityTransform fit_similarity_least_squares(std::span<const Point> src,
                                                 std::span<const Point> dst) {
  if (src.size() != dst.size()) {
    throw InvalidArgument("fit_similarity_least_squares: size mismatch");
  }
  if (src.size() < 2) {
    throw NotEnoughPoints("fit_similarity_least_squares: need >= 2 points");
  }
  const double n = static_cast<double>(src.size());
  double msx = 0, msy = 0, mdx = 0, mdy = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    msx += src[i].x;
    msy += src[i].y;
    mdx += dst[i].x;
    mdy += dst[i].y;
  }
  msx /= n;
  msy /= n;
  mdx /= n;
  mdy /= n;
  double dot = 0, cross = 0, norm = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double sx = src[i].x - msx;
    const double sy = src[i].y - msy;
    const double dx = dst[i].x - mdx;
    const double dy = dst[i].y - mdy;
    dot += sx * dx + sy * dy;
    cross += sx * dy - sy * dx;
    norm += sx * sx + sy * sy;
  }
  if (norm == 0.0) {
    throw DegenerateSample("fit_similarity_least_squares: no source spread");
  }
  const double a = dot / norm;
  const double b = cross / norm;
  if (a == 0.0 && b == 0.0) {
    throw DegenerateSample("fit_similarity_least_squares: zero scale");
  }
  return from_linear(a, b, mdx - (a * msx - b * msy), mdy - (b * msx + a * msy));
}

RansacResult estimate_similarity_ransac(std::span<const Point> src,
                                        std::span<const Point> dst,
                                        const RansacParams& params) {
  if (src.size() != dst.size()) {
    throw InvalidArgument("estimate_similarity_ransac: size mismatch");
  }
  const std::size_t n = src.size();
  if (n < 2) {
    throw NotEnoughPoints("estimate_similarity_ransac: need >= 2 correspondences");
  }
  if (params.iterations < 1 || !(params.inlier_threshold > 0.0)) {
    throw InvalidArgument("estimate_similarity_ransac: bad parameters");
  }
  const int min_inliers =
      params.min_inliers > 0
          ? params.min_inliers
          : std::max(2, static_cast<int>((n + 1) / 2));

  auto consensus = [&](const SimilarityTransform& m, std::vector<bool>& mask,
                       double& err_sum) {
    int count = 0;
    err_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = residual(m, src[i], dst[i]);
      mask[i] = r <= params.inlier_threshold;
      if (mask[i]) {
        ++count;
        err_sum += r;
      }
    }
    return count;
  };

  SimilarityTransform best;
  std::vector<bool> best_mask(n, false);
  int best_count = -1;
  double best_err = 0.0;
  std::vector<bool> mask(n);

  for (int trial = 0; trial < params.iterations; ++trial) {
    std::mt19937_64 rng(splitmix64(params.seed ^ splitmix64(std::uint64_t(trial))));
    const std::size_t i = rng() % n;
    std::size_t j = rng() % (n - 1);
    if (j >= i) ++j;
    SimilarityTransform m;
    try {
      const Point s[2] = {src[i], src[j]};
      const Point d[2] = {dst[i], dst[j]};
      m = solve_similarity_minimal(s, d);
    } catch (const DegenerateSample&) {
      continue;
    }
    double err = 0.0;
    const int count = consensus(m, mask, err);
    if (count > best_count || (count == best_count && err < best_err)) {
      best = m;
      best_mask = mask;
      best_count = count;
      best_err = err;
    }
  }
  if (best_count < min_inliers) {
    throw NoConsensus("estimate_similarity_ransac: best consensus " +
                      std::to_string(std::max(best_count, 0)) + " < " +
                      std::to_string(min_inliers));
  }

  std::vector<Point> in_src;
  std::vector<Point> in_dst;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask[i]) {
      in_src.push_back(src[i]);
      in_dst.push_back(dst[i]);
    }
  }
  // The refit replaces the sampled model only when it does not raise the
  // mean residual over the consensus set.
  SimilarityTransform chosen = best;
  try {
    const SimilarityTransform refit = fit_similarity_least_squares(in_src, in_dst);
    double refit_err = 0.0;
    for (std::size_t k = 0; k < in_src.size(); ++k) {
      refit_err += residual(refit, in_src[k], in_dst[k]);
    }
    if (refit_err <= best_err) chosen = refit;
  } catch (const DegenerateSample&) {
  }

  RansacResult result;
  result.inliers.assign(n, false);
  double err = 0.0;
  result.inlier_count = consensus(chosen, result.inliers, err);
  result.transform = chosen;
  if (result.inlier_count < min_inliers) {
    result.transform = best;
    result.inliers = best_mask;
    result.inlier_count = best_count;
  }
  return result;
}

BoundingBox warp_bbox(const BoundingBox& box, const SimilarityTransform& m) {
  const Point tl = apply_transform(m, {box.x, box.y});
  const Point br = apply_transform(m, {box.right(), box.bottom()});
  const double x0 = std::min(tl.x, br.x);
  const double x1 = std::max(tl.x, br.x);
  const double y0 = std::min(tl.y, br.y);
  const double y1 = std::max(tl.y, br.y);
  return {x0, y0, std::max(0.0, x1 - x0), std::max(0.0, y1 - y0)};
}

}  // namespace hybridmot
