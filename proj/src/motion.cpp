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

#include "hybridmot/motion.hpp"

#include <Eigen/Cholesky>

#include "hybridmot/error.hpp"

namespace hybridmot {

namespace {

using ProjectionMatrix = Eigen::Matrix<double, 4, 8>;

StateCovariance transition() {
  StateCovariance f = StateCovariance::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

ProjectionMatrix projection() {
  ProjectionMatrix h = ProjectionMatrix::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  return h;
}

MeasurementCovariance measurement_noise(double height) {
  const double pos = kStdWeightPosition * height;
  MeasurementVector std_dev(pos, pos, 1e-1, pos);
  return std_dev.array().square().matrix().asDiagonal();
}

}  // namespace

BoundingBox KalmanState::box() const {
  const double h = mean(3);
  const double w = mean(2) * h;
  return {mean(0) - 0.5 * w, mean(1) - 0.5 * h, w, h};
}

MeasurementVector to_measurement(const BoundingBox& box) {
  return {box.x + 0.5 * box.w, box.y + 0.5 * box.h, box.w / box.h, box.h};
}

KalmanState kalman_init(const BoundingBox& box) {
  if (!(box.w > 0.0) || !(box.h > 0.0)) {
    throw InvalidArgument("kalman_init: box must have positive area");
  }
  KalmanState s;
  s.mean.head<4>() = to_measurement(box);
  s.mean.tail<4>().setZero();
  const double h = box.h;
  StateVector std_dev;
  std_dev << 2 * kStdWeightPosition * h, 2 * kStdWeightPosition * h, 1e-2,
      2 * kStdWeightPosition * h, 10 * kStdWeightVelocity * h,
      10 * kStdWeightVelocity * h, 1e-5, 10 * kStdWeightVelocity * h;
  s.covariance = std_dev.array().square().matrix().asDiagonal();
  return s;
}

KalmanState kalman_predict(const KalmanState& state) {
  static const StateCovariance f = transition();
  const double h = state.mean(3);
  StateVector std_dev;
  std_dev << kStdWeightPosition * h, kStdWeightPosition * h, 1e-2,
      kStdWeightPosition * h, kStdWeightVelocity * h, kStdWeightVelocity * h,
      1e-5, kStdWeightVelocity * h;
  StateCovariance q = std_dev.array().square().matrix().asDiagonal();
  KalmanState out;
  out.mean = f * state.mean;
  out.covariance = f * state.covariance * f.transpose() + q;
  return out;
}

MeasurementCovariance innovation_covariance(const KalmanState& state) {
  return state.covariance.topLeftCorner<4, 4>() + measurement_noise(state.mean(3));
}

KalmanState kalman_update(const KalmanState& state, const BoundingBox& z) {
  static const ProjectionMatrix hm = projection();
  if (!(z.h > 0.0)) throw InvalidArgument("kalman_update: measurement height must be > 0");
  const MeasurementCovariance s =
      state.covariance.topLeftCorner<4, 4>() + measurement_noise(z.h);
  Eigen::LLT<MeasurementCovariance> llt(s);
  if (llt.info() != Eigen::Success) {
    throw SingularInnovation("kalman_update: innovation covariance not positive definite");
  }
  // K = P H' S^-1, solved as S K' = H P.
  const Eigen::Matrix<double, 8, 4> pht = state.covariance * hm.transpose();
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(pht.transpose()).transpose();
  const MeasurementVector innovation = to_measurement(z) - hm * state.mean;
  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.covariance = (StateCovariance::Identity() - gain * hm) * state.covariance;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

std::vector<double> mahalanobis_gate(const KalmanState& state,
                                     std::span<const BoundingBox> candidates) {
  Eigen::LLT<MeasurementCovariance> llt(innovation_covariance(state));
  if (llt.info() != Eigen::Success) {
    throw SingularInnovation("mahalanobis_gate: innovation covariance not positive definite");
  }
  const MeasurementVector projected = state.mean.head<4>();
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const BoundingBox& c : candidates) {
    const MeasurementVector y = to_measurement(c) - projected;
    const MeasurementVector z = llt.matrixL().solve(y);
    out.push_back(z.squaredNorm());
  }
  return out;
}

}  // namespace hybridmot
