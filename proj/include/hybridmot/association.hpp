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

#ifndef HYBRIDMOT_ASSOCIATION_HPP_
#define HYBRIDMOT_ASSOCIATION_HPP_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hybridmot/features.hpp"
#include "hybridmot/geometry.hpp"
#include "hybridmot/motion.hpp"

namespace hybridmot {

using Embedding = std::vector<float>;

struct Detection {
  BoundingBox box;
  double confidence = 0.0;
  // Unit norm when present.
  std::optional<Embedding> embedding;
};

enum class TrackState { kActive, kLost, kRemoved };

struct Track {
  int id = 0;
  TrackState state = TrackState::kActive;
  KalmanState kalman;
  BoundingBox box;
  std::optional<Embedding> embedding;
  std::vector<Keypoint> keypoints;
  int frames_since_update = 0;
  int age = 0;
};

inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

// Dense row-major cost matrix; rows are tracks, columns detections. Entries
// are finite and non-negative, or kForbidden.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  static bool forbidden(double v) { return v == kForbidden; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct AssociationOutcome {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (row, col)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;
};

// Rectangular assignment. Among all matchings that use only allowed entries
// it picks one with the largest number of pairs, and among those the smallest
// total cost. Matches are reported in ascending row order.
AssociationOutcome hungarian_solve(const CostMatrix& costs);

// Sum of the matched entries, accumulated in row order.
double assignment_cost(const CostMatrix& costs, const AssociationOutcome& outcome);

inline constexpr double kMinAssociationIou = 0.1;
inline constexpr double kAppearanceWeight = 0.98;

// 1 - IoU, forbidden below kMinAssociationIou.
CostMatrix iou_cost(std::span<const BoundingBox> tracks,
                    std::span<const BoundingBox> dets);

// Appearance/motion fusion for pairs that both carry an embedding, the IoU
// cost otherwise. Pairs outside the chi-square gate are forbidden.
CostMatrix fused_cost(std::span<const Track> tracks,
                      std::span<const Detection> dets,
                      double appearance_weight = kAppearanceWeight);

struct ByteParams {
  double tau = 0.5;
  double tau_init = 0.6;
  double min_confidence = 0.1;
  double high_match_gate = 0.7;
  double low_match_gate = 0.5;
  bool second_stage = true;
  double appearance_weight = kAppearanceWeight;
};

struct ByteOutcome {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track, det)
  // Tracks left after both stages.
  std::vector<std::size_t> unmatched_tracks;
  // High-confidence detections left after stage 1.
  std::vector<std::size_t> unmatched_detections;
  // Subset of unmatched_detections confident enough to start a track.
  std::vector<std::size_t> new_track_candidates;
  // Low-confidence detections not used by stage 2.
  std::vector<std::size_t> unmatched_low;
  // Detections at or below the confidence floor.
  std::vector<std::size_t> discarded;
};

// Two-stage association: tracks against detections above tau with the fused
// cost, then the remaining tracks against the low band with IoU only. Tracks
// must already be Kalman-predicted to the current frame. With
// second_stage = false the low band is dropped entirely.
ByteOutcome byte_associate(std::span<const Track> tracks,
                           std::span<const Detection> dets,
                           const ByteParams& params);

}  // namespace hybridmot

#endif  // HYBRIDMOT_ASSOCIATION_HPP_
