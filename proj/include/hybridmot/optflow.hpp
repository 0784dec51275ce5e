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

#ifndef HYBRIDMOT_OPTFLOW_HPP_
#define HYBRIDMOT_OPTFLOW_HPP_

#include <span>
#include <vector>

#include "hybridmot/features.hpp"
#include "hybridmot/imgcore.hpp"

namespace hybridmot {

struct FlowParams {
  int levels = 3;
  int window_radius = 7;
  int max_iterations = 10;
  double epsilon = 0.01;
  // Minimum eigenvalue of the structure tensor divided by the window area,
  // with intensities scaled to [0, 1].
  double min_eigenvalue = 1e-4;
  // Mean absolute residual over the window, in 0..255 intensity units.
  double max_error = 20.0;
};

enum class FlowStatus {
  kTracked,
  kLostOutOfBounds,
  kLostLowTexture,
  kLostHighError,
};

const char* to_string(FlowStatus status);

struct FlowResult {
  Point point;
  FlowStatus status = FlowStatus::kLostOutOfBounds;
  double error = 0.0;
};

// Coarse-to-fine Lucas-Kanade. Gradients come from `prev` and are reused
// across iterations. Coarse levels whose window does not fit inside the image
// are skipped; at level 0 a window leaving either image loses the point.
// Output order matches `points`. Throws InvalidArgument when the pyramids
// were not built from same-sized frames.
std::vector<FlowResult> lk_track_points(const Pyramid& prev, const Pyramid& next,
                                        std::span<const Keypoint> points,
                                        const FlowParams& params);

}  // namespace hybridmot

#endif  // HYBRIDMOT_OPTFLOW_HPP_
