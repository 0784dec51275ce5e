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

#include "hybridmot/optflow.hpp"

#include <algorithm>
#include <cmath>

#include "hybridmot/error.hpp"

namespace hybridmot {

namespace {

constexpr double kIntensityScale = 255.0;

bool window_fits(const GrayImage& img, double cx, double cy, double half) {
  return cx - half >= 0.0 && cy - half >= 0.0 && cx + half <= img.width() - 1 &&
         cy + half <= img.height() - 1;
}

// Per-point scratch holding the template window and its gradients.
// Border-replicated bilinear sample.
double sample_clamped(const GrayImage& img, double x, double y) {
  return img.sample_unchecked(std::clamp(x, 0.0, double(img.width() - 1)),
                              std::clamp(y, 0.0, double(img.height() - 1)));
}

// Coarse levels replicate borders so points near the edge still get a
// coarse estimate; full resolution never reads outside the image.
double sample_at(const GrayImage& img, double x, double y, bool strict) {
  return strict ? img.sample_unchecked(x, y) : sample_clamped(img, x, y);
}

bool window_touches(const GrayImage& img, double cx, double cy, double half) {
  return cx + half >= 0.0 && cy + half >= 0.0 && cx - half <= img.width() - 1 &&
         cy - half <= img.height() - 1;
}

struct Window {
  int radius = 0;
  std::vector<double> value;
  std::vector<double> gx;
  std::vector<double> gy;

  explicit Window(int r)
      : radius(r),
        value(std::size_t((2 * r + 1) * (2 * r + 1))),
        gx(value.size()),
        gy(value.size()) {}
};

FlowResult track_one(const Pyramid& prev, const Pyramid& next, int levels,
                     const Keypoint& kp, const FlowParams& params, Window& win) {
  const int r = params.window_radius;
  const double area = double((2 * r + 1) * (2 * r + 1));
  FlowResult result;
  result.point = {kp.x, kp.y};

  double gx_guess = 0.0;
  double gy_guess = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  for (int level = levels - 1; level >= 0; --level) {
    const GrayImage& img_i = prev.level(level);
    const GrayImage& img_j = next.level(level);
    const double scale = 1.0 / double(1 << level);
    const double px = kp.x * scale;
    const double py = kp.y * scale;
    dx = 0.0;
    dy = 0.0;

    const bool strict = level == 0;
    // Central differences need one extra pixel around the window.
    if (strict && !window_fits(img_i, px, py, r + 1.0)) {
      result.status = FlowStatus::kLostOutOfBounds;
      return result;
    }

    double g_xx = 0.0, g_xy = 0.0, g_yy = 0.0;
    std::size_t n = 0;
    for (int j = -r; j <= r; ++j) {
      for (int i = -r; i <= r; ++i, ++n) {
        const double x = px + i;
        const double y = py + j;
        win.value[n] = sample_at(img_i, x, y, strict);
        win.gx[n] = 0.5 * (sample_at(img_i, x + 1.0, y, strict) -
                           sample_at(img_i, x - 1.0, y, strict));
        win.gy[n] = 0.5 * (sample_at(img_i, x, y + 1.0, strict) -
                           sample_at(img_i, x, y - 1.0, strict));
        g_xx += win.gx[n] * win.gx[n];
        g_xy += win.gx[n] * win.gy[n];
        g_yy += win.gy[n] * win.gy[n];
      }
    }
    const double det = g_xx * g_yy - g_xy * g_xy;
    const double min_eig =
        0.5 * (g_xx + g_yy - std::sqrt((g_xx - g_yy) * (g_xx - g_yy) + 4.0 * g_xy * g_xy));
    const double normalized = min_eig / (area * kIntensityScale * kIntensityScale);
    if (normalized < params.min_eigenvalue || det <= 0.0) {
      if (level == 0) {
        result.status = FlowStatus::kLostLowTexture;
        return result;
      }
      gx_guess *= 2.0;
      gy_guess *= 2.0;
      continue;
    }

    bool left_image = false;
    for (int iter = 0; iter < params.max_iterations; ++iter) {
      const double qx = px + gx_guess + dx;
      const double qy = py + gy_guess + dy;
      if (strict ? !window_fits(img_j, qx, qy, r) : !window_touches(img_j, qx, qy, r)) {
        left_image = true;
        break;
      }
      double bx = 0.0, by = 0.0;
      n = 0;
      for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i, ++n) {
          const double diff = win.value[n] - sample_at(img_j, qx + i, qy + j, strict);
          bx += diff * win.gx[n];
          by += diff * win.gy[n];
        }
      }
      const double step_x = (g_yy * bx - g_xy * by) / det;
      const double step_y = (g_xx * by - g_xy * bx) / det;
      dx += step_x;
      dy += step_y;
      if (std::hypot(step_x, step_y) < params.epsilon) break;
    }
    if (left_image) {
      if (level == 0) {
        result.status = FlowStatus::kLostOutOfBounds;
        return result;
      }
      // Keep the guess from the coarser levels and try again finer.
      dx = 0.0;
      dy = 0.0;
    }
    if (level > 0) {
      gx_guess = 2.0 * (gx_guess + dx);
      gy_guess = 2.0 * (gy_guess + dy);
    }
  }

  const double fx = kp.x + gx_guess + dx;
  const double fy = kp.y + gy_guess + dy;
  result.point = {fx, fy};
  const GrayImage& base_j = next.level(0);
  if (!window_fits(base_j, fx, fy, r)) {
    result.status = FlowStatus::kLostOutOfBounds;
    return result;
  }
  double err = 0.0;
  std::size_t n = 0;
  for (int j = -r; j <= r; ++j) {
    for (int i = -r; i <= r; ++i, ++n) {
      err += std::abs(win.value[n] - base_j.sample_unchecked(fx + i, fy + j));
    }
  }
  result.error = err / area;
  result.status = result.error > params.max_error ? FlowStatus::kLostHighError
                                                  : FlowStatus::kTracked;
  return result;
}

}  // namespace

const char* to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::kTracked:
      return "Tracked";
    case FlowStatus::kLostOutOfBounds:
      return "LostOutOfBounds";
    case FlowStatus::kLostLowTexture:
      return "LostLowTexture";
    case FlowStatus::kLostHighError:
      return "LostHighError";
  }
  return "?";
}

std::vector<FlowResult> lk_track_points(const Pyramid& prev, const Pyramid& next,
                                        std::span<const Keypoint> points,
                                        const FlowParams& params) {
  if (prev.size() == 0 || next.size() == 0 ||
      prev.level(0).width() != next.level(0).width() ||
      prev.level(0).height() != next.level(0).height()) {
    throw InvalidArgument("lk_track_points: pyramids built from different frame sizes");
  }
  if (params.levels < 1 || params.window_radius < 2 || !(params.epsilon > 0.0) ||
      params.max_iterations < 1) {
    throw InvalidArgument("lk_track_points: bad flow parameters");
  }
  const int levels = std::min({params.levels, prev.size(), next.size()});
  Window win(params.window_radius);
  std::vector<FlowResult> out;
  out.reserve(points.size());
  for (const Keypoint& kp : points) {
    out.push_back(track_one(prev, next, levels, kp, params, win));
  }
  return out;
}

}  // namespace hybridmot
