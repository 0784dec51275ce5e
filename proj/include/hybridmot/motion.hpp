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

#ifndef HYBRIDMOT_MOTION_HPP_
#define HYBRIDMOT_MOTION_HPP_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "hybridmot/geometry.hpp"

namespace hybridmot {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Matrix<double, 4, 1>;
using MeasurementCovariance = Eigen::Matrix<double, 4, 4>;

// Constant-velocity box model over (cx, cy, a, h) with a = w / h, plus the
// per-frame velocity of each component.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();

  BoundingBox box() const;
};

// Noise weights relative to box height.
inline constexpr double kStdWeightPosition = 1.0 / 20.0;
inline constexpr double kStdWeightVelocity = 1.0 / 160.0;

// 0.95 quantile of chi-square with 4 degrees of freedom.
inline constexpr double kChi2Gate95 = 9.4877;

MeasurementVector to_measurement(const BoundingBox& box);

// Throws InvalidArgument for a box without positive area.
KalmanState kalman_init(const BoundingBox& box);

KalmanState kalman_predict(const KalmanState& state);

// Throws SingularInnovation when H P H' + R is not positive definite.
KalmanState kalman_update(const KalmanState& state, const BoundingBox& z);

// Innovation covariance S = H P H' + R with R scaled by the state height.
MeasurementCovariance innovation_covariance(const KalmanState& state);

// Squared Mahalanobis distance of each candidate from the projected state.
std::vector<double> mahalanobis_gate(const KalmanState& state,
                                     std::span<const BoundingBox> candidates);

}  // namespace hybridmot

#endif  // HYBRIDMOT_MOTION_HPP_
