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

#include "hybridmot/heads.hpp"

#include <algorithm>
#include <cmath>

#include "hybridmot/error.hpp"

namespace hybridmot::heads {

namespace {

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

std::size_t count_peaks(const Heatmap& target) {
  return static_cast<std::size_t>(
      std::count(target.values.begin(), target.values.end(), 1.0));
}

void check_pair(const Heatmap& target, const Heatmap& prediction) {
  if (target.width != prediction.width || target.height != prediction.height ||
      target.values.size() != prediction.values.size()) {
    throw InvalidArgument("heatmap_focal_loss: shape mismatch");
  }
}

void check_box_batch(const BoxRegressionBatch& b) {
  const std::size_t n = b.offsets.size();
  if (n == 0 || b.sizes.size() != n || b.predicted_offsets.size() != n ||
      b.predicted_sizes.size() != n) {
    throw InvalidArgument("box_loss: batch lists must be non-empty and equal length");
  }
}

void check_identity_batch(const IdentityBatch& b) {
  if (b.labels.size() != b.probabilities.size()) {
    throw InvalidArgument("identity_loss: label/probability count mismatch");
  }
  for (std::size_t i = 0; i < b.labels.size(); ++i) {
    if (b.labels[i].size() != b.probabilities[i].size()) {
      throw InvalidArgument("identity_loss: class count mismatch");
    }
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double adaptive_sigma(double box_width, double box_height) {
  return std::max(1.0, std::hypot(box_width, box_height) / 6.0);
}

Heatmap render_heatmap_target(std::span<const HeatmapCenter> centers, int width,
                              int height) {
  if (width < 1 || height < 1) throw InvalidArgument("render_heatmap_target: empty grid");
  Heatmap map(width, height, 0.0);
  for (const HeatmapCenter& c : centers) {
    if (!(c.center.x >= 0.0) || !(c.center.y >= 0.0) || c.center.x > width - 1 ||
        c.center.y > height - 1) {
      throw InvalidArgument("render_heatmap_target: centre outside grid");
    }
    if (!(c.sigma > 0.0)) throw InvalidArgument("render_heatmap_target: sigma must be > 0");
    const int cx = static_cast<int>(std::lround(c.center.x));
    const int cy = static_cast<int>(std::lround(c.center.y));
    const double denom = 2.0 * c.sigma * c.sigma;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        const double v = std::exp(-(dx * dx + dy * dy) / denom);
        map.at(x, y) = std::max(map.at(x, y), v);
      }
    }
  }
  return map;
}

double heatmap_focal_loss(const Heatmap& target, const Heatmap& prediction,
                          const FocalParams& params) {
  check_pair(target, prediction);
  const std::size_t peaks = count_peaks(target);
  if (peaks == 0) throw InvalidArgument("heatmap_focal_loss: target has no peaks");
  double sum = 0.0;
  for (std::size_t i = 0; i < target.values.size(); ++i) {
    const double m = target.values[i];
    const double p = clamp_probability(prediction.values[i]);
    if (m == 1.0) {
      sum += std::pow(1.0 - p, params.alpha) * std::log(p);
    } else {
      sum += std::pow(1.0 - m, params.beta) * std::pow(p, params.alpha) *
             std::log(1.0 - p);
    }
  }
  return -sum / double(peaks);
}

std::vector<double> heatmap_focal_loss_grad(const Heatmap& target,
                                            const Heatmap& prediction,
                                            const FocalParams& params) {
  check_pair(target, prediction);
  const std::size_t peaks = count_peaks(target);
  if (peaks == 0) throw InvalidArgument("heatmap_focal_loss: target has no peaks");
  const double a = params.alpha;
  std::vector<double> grad(target.values.size(), 0.0);
  for (std::size_t i = 0; i < target.values.size(); ++i) {
    const double raw = prediction.values[i];
    if (raw < kProbabilityClamp || raw > 1.0 - kProbabilityClamp) continue;
    const double m = target.values[i];
    const double p = raw;
    double d = 0.0;
    if (m == 1.0) {
      d = -a * std::pow(1.0 - p, a - 1.0) * std::log(p) + std::pow(1.0 - p, a) / p;
    } else {
      d = std::pow(1.0 - m, params.beta) *
          (a * std::pow(p, a - 1.0) * std::log(1.0 - p) - std::pow(p, a) / (1.0 - p));
    }
    grad[i] = -d / double(peaks);
  }
  return grad;
}

double box_loss(const BoxRegressionBatch& batch) {
  check_box_batch(batch);
  double offset_term = 0.0;
  double size_term = 0.0;
  for (std::size_t i = 0; i < batch.offsets.size(); ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      offset_term += std::abs(batch.offsets[i][k] - batch.predicted_offsets[i][k]);
      size_term += std::abs(batch.sizes[i][k] - batch.predicted_sizes[i][k]);
    }
  }
  return offset_term + batch.lambda_s * size_term;
}

BoxLossGrad box_loss_grad(const BoxRegressionBatch& batch) {
  check_box_batch(batch);
  BoxLossGrad g;
  g.d_offsets.resize(batch.offsets.size());
  g.d_sizes.resize(batch.offsets.size());
  for (std::size_t i = 0; i < batch.offsets.size(); ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      g.d_offsets[i][k] = sign(batch.predicted_offsets[i][k] - batch.offsets[i][k]);
      g.d_sizes[i][k] =
          batch.lambda_s * sign(batch.predicted_sizes[i][k] - batch.sizes[i][k]);
    }
  }
  return g;
}

double identity_loss(const IdentityBatch& batch) {
  check_identity_batch(batch);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.labels.size(); ++i) {
    for (std::size_t k = 0; k < batch.labels[i].size(); ++k) {
      const double label = batch.labels[i][k];
      if (label == 0.0) continue;
      loss -= label * std::log(std::max(batch.probabilities[i][k], kProbabilityClamp));
    }
  }
  return loss;
}

std::vector<std::vector<double>> identity_loss_grad(const IdentityBatch& batch) {
  check_identity_batch(batch);
  std::vector<std::vector<double>> grad(batch.labels.size());
  for (std::size_t i = 0; i < batch.labels.size(); ++i) {
    grad[i].assign(batch.labels[i].size(), 0.0);
    for (std::size_t k = 0; k < batch.labels[i].size(); ++k) {
      const double p = batch.probabilities[i][k];
      if (batch.labels[i][k] != 0.0 && p > kProbabilityClamp) {
        grad[i][k] = -batch.labels[i][k] / p;
      }
    }
  }
  return grad;
}

double total_loss(double l_det, double l_id, const UncertaintyWeights& w) {
  return 0.5 * (std::exp(-w.w1) * l_det + std::exp(-w.w2) * l_id + w.w1 + w.w2);
}

TotalLossGrad total_loss_grad(double l_det, double l_id, const UncertaintyWeights& w) {
  TotalLossGrad g;
  g.d_l_det = 0.5 * std::exp(-w.w1);
  g.d_l_id = 0.5 * std::exp(-w.w2);
  g.d_w1 = 0.5 * (1.0 - std::exp(-w.w1) * l_det);
  g.d_w2 = 0.5 * (1.0 - std::exp(-w.w2) * l_id);
  return g;
}

}  // namespace hybridmot::heads
