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

#ifndef HYBRIDMOT_HEADS_HPP_
#define HYBRIDMOT_HEADS_HPP_

#include <array>
#include <span>
#include <vector>

#include "hybridmot/geometry.hpp"

// Training objectives of a joint detection / re-identification tracker,
// written as plain functions with analytic gradients. No network lives here.
namespace hybridmot::heads {

inline constexpr double kProbabilityClamp = 1e-12;

// Row-major H x W grid.
struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Heatmap() = default;
  Heatmap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(std::size_t(w) * std::size_t(h), fill) {}

  double at(int x, int y) const { return values[std::size_t(y) * width + x]; }
  double& at(int x, int y) { return values[std::size_t(y) * width + x]; }
};

struct HeatmapCenter {
  Point center;
  double sigma = 1.0;
};

// sigma = max(1, diagonal / 6).
double adaptive_sigma(double box_width, double box_height);

// Gaussian bumps peaking at exactly 1.0 on the pixel nearest each centre,
// combined by elementwise max. Throws InvalidArgument for a centre outside
// the grid or a non-positive sigma.
Heatmap render_heatmap_target(std::span<const HeatmapCenter> centers, int width,
                              int height);

struct FocalParams {
  double alpha = 2.0;
  double beta = 4.0;
};

// Pixel-wise focal loss normalised by the number of exact 1.0 peaks in
// `target`. Predictions are clamped to [1e-12, 1 - 1e-12]. Throws
// InvalidArgument on shape mismatch or when the target has no peak.
double heatmap_focal_loss(const Heatmap& target, const Heatmap& prediction,
                          const FocalParams& params = {});

// d loss / d prediction, same layout as the grid.
std::vector<double> heatmap_focal_loss_grad(const Heatmap& target,
                                            const Heatmap& prediction,
                                            const FocalParams& params = {});

using Vec2 = std::array<double, 2>;

struct BoxRegressionBatch {
  std::vector<Vec2> offsets;
  std::vector<Vec2> sizes;
  std::vector<Vec2> predicted_offsets;
  std::vector<Vec2> predicted_sizes;
  double lambda_s = 0.1;
};

// L1 offset error plus lambda_s times L1 size error, summed over objects.
double box_loss(const BoxRegressionBatch& batch);

struct BoxLossGrad {
  std::vector<Vec2> d_offsets;  // w.r.t. predicted_offsets
  std::vector<Vec2> d_sizes;    // w.r.t. predicted_sizes
};

// Subgradient 0 where a prediction equals its target.
BoxLossGrad box_loss_grad(const BoxRegressionBatch& batch);

struct IdentityBatch {
  // One-hot rows, K columns each.
  std::vector<std::vector<double>> labels;
  // Per-object class distributions.
  std::vector<std::vector<double>> probabilities;
};

// Cross entropy summed over objects.
double identity_loss(const IdentityBatch& batch);

// d loss / d probabilities.
std::vector<std::vector<double>> identity_loss_grad(const IdentityBatch& batch);

struct UncertaintyWeights {
  double w1 = 0.0;
  double w2 = 0.0;
};

// 0.5 * (exp(-w1) l_det + exp(-w2) l_id + w1 + w2).
double total_loss(double l_det, double l_id, const UncertaintyWeights& w);

struct TotalLossGrad {
  double d_l_det = 0.0;
  double d_l_id = 0.0;
  double d_w1 = 0.0;
  double d_w2 = 0.0;
};

TotalLossGrad total_loss_grad(double l_det, double l_id, const UncertaintyWeights& w);

}  // namespace hybridmot::heads

#endif  // HYBRIDMOT_HEADS_HPP_
