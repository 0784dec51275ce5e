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

#include "hybridmot/features.hpp"

#include <algorithm>
#include <cmath>

#include "hybridmot/error.hpp"

namespace hybridmot {

namespace {

void check_params(double threshold, int arc) {
  if (!(threshold > 0.0)) throw InvalidArgument("FAST: threshold must be > 0");
  if (arc < 9 || arc > 12) throw InvalidArgument("FAST: arc must be in [9, 12]");
}

// Inclusive pixel rectangle.
struct Region {
  int x0, y0, x1, y1;
  bool empty() const { return x1 < x0 || y1 < y0; }
};

Region valid_region(const GrayImage& img) {
  return {kFastBorder, kFastBorder, img.width() - 1 - kFastBorder,
          img.height() - 1 - kFastBorder};
}

Region intersect(const Region& a, const Region& b) {
  return {std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
          std::min(a.y1, b.y1)};
}

// Corners inside `roi` (already clipped to the valid region), raster order.
std::vector<Keypoint> detect_region(const GrayImage& img, const Region& roi,
                                    double threshold, int arc, bool nonmax) {
  std::vector<Keypoint> out;
  if (roi.empty()) return out;
  // Score map over roi grown by one pixel so the 3x3 suppression can look at
  // neighbours just outside it.
  const Region grown =
      intersect({roi.x0 - 1, roi.y0 - 1, roi.x1 + 1, roi.y1 + 1}, valid_region(img));
  const int gw = grown.x1 - grown.x0 + 1;
  const int gh = grown.y1 - grown.y0 + 1;
  std::vector<double> scores(std::size_t(gw) * std::size_t(gh), 0.0);
  auto score_at = [&](int x, int y) -> double {
    if (x < grown.x0 || x > grown.x1 || y < grown.y0 || y > grown.y1) return 0.0;
    return scores[std::size_t(y - grown.y0) * gw + std::size_t(x - grown.x0)];
  };
  for (int y = grown.y0; y <= grown.y1; ++y) {
    for (int x = grown.x0; x <= grown.x1; ++x) {
      scores[std::size_t(y - grown.y0) * gw + std::size_t(x - grown.x0)] =
          fast_score(img, x, y, threshold, arc);
    }
  }
  for (int y = roi.y0; y <= roi.y1; ++y) {
    for (int x = roi.x0; x <= roi.x1; ++x) {
      const double s = score_at(x, y);
      if (s <= 0.0) continue;
      if (nonmax) {
        bool is_max = true;
        for (int dy = -1; dy <= 1 && is_max; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx != 0 || dy != 0) && score_at(x + dx, y + dy) >= s) {
              is_max = false;
              break;
            }
          }
        }
        if (!is_max) continue;
      }
      out.push_back({double(x), double(y), s});
    }
  }
  return out;
}

}  // namespace

double fast_score(const GrayImage& img, int x, int y, double threshold, int arc) {
  const double center = img.at(x, y);
  std::array<int, 16> sign{};
  std::array<double, 16> excess{};
  for (std::size_t k = 0; k < 16; ++k) {
    const double v = img.at(x + kFastCircle[k][0], y + kFastCircle[k][1]);
    const double d = v - center;
    if (d > threshold) {
      sign[k] = 1;
    } else if (d < -threshold) {
      sign[k] = -1;
    }
    excess[k] = std::abs(d) - threshold;
  }
  // Start scanning right after a sign change so runs never straddle the
  // scan origin. A uniform circle is one run of 16.
  int start = 0;
  for (int k = 0; k < 16; ++k) {
    if (sign[std::size_t(k)] != sign[std::size_t((k + 15) % 16)]) {
      start = k;
      break;
    }
  }
  double best = 0.0;
  int k = 0;
  while (k < 16) {
    const std::size_t idx = std::size_t((start + k) % 16);
    const int s = sign[idx];
    if (s == 0) {
      ++k;
      continue;
    }
    int len = 0;
    double sum = 0.0;
    while (k < 16 && sign[std::size_t((start + k) % 16)] == s) {
      sum += excess[std::size_t((start + k) % 16)];
      ++len;
      ++k;
    }
    if (len >= arc) best = std::max(best, sum);
  }
  return best;
}

std::vector<Keypoint> fast_detect(const GrayImage& img, double threshold,
                                  int arc, bool nonmax) {
  check_params(threshold, arc);
  if (img.width() < 7 || img.height() < 7) return {};
  return detect_region(img, valid_region(img), threshold, arc, nonmax);
}

std::vector<Keypoint> detect_in_box(const GrayImage& img, const BoundingBox& box,
                                    int budget, double threshold, int arc) {
  check_params(threshold, arc);
  if (budget <= 0 || !(box.w > 0.0) || !(box.h > 0.0) || img.empty()) return {};
  if (box.right() <= 0.0 || box.bottom() <= 0.0 || box.x >= img.width() ||
      box.y >= img.height()) {
    return {};
  }
  const double mx = 0.1 * box.w;
  const double my = 0.1 * box.h;
  const double fx0 = std::ceil(box.x + mx);
  const double fy0 = std::ceil(box.y + my);
  const double fx1 = std::ceil(box.right() - mx) - 1.0;
  const double fy1 = std::ceil(box.bottom() - my) - 1.0;
  auto to_int = [](double v) {
    return static_cast<int>(std::clamp(v, -1e6, 1e6));
  };
  std::vector<Keypoint> corners;
  if (img.width() >= 7 && img.height() >= 7) {
    const Region roi = intersect({to_int(fx0), to_int(fy0), to_int(fx1), to_int(fy1)},
                                 valid_region(img));
    corners = detect_region(img, roi, threshold, arc, true);
  }
  if (corners.empty()) {
    const Point c = box.center();
    return {{std::clamp(c.x, 0.0, double(img.width() - 1)),
             std::clamp(c.y, 0.0, double(img.height() - 1)), 0.0}};
  }
  std::sort(corners.begin(), corners.end(),
            [](const Keypoint& a, const Keypoint& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.y != b.y) return a.y < b.y;
              return a.x < b.x;
            });
  if (corners.size() > std::size_t(budget)) corners.resize(std::size_t(budget));
  return corners;
}

}  // namespace hybridmot
