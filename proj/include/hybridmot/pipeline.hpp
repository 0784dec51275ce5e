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

#ifndef HYBRIDMOT_PIPELINE_HPP_
#define HYBRIDMOT_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hybridmot/association.hpp"
#include "hybridmot/error.hpp"
#include "hybridmot/geometry.hpp"
#include "hybridmot/imgcore.hpp"
#include "hybridmot/optflow.hpp"

namespace hybridmot {

struct TrackerConfig {
  // Flow frames between consecutive keyframes.
  int skip = 0;
  ByteParams byte;
  FlowParams flow;
  RansacParams ransac;
  int keypoint_budget = 20;
  double fast_threshold = 20.0;
  int max_lost = 30;
  std::uint64_t seed = 0;
  // false: flow frames coast on the Kalman prediction and no keypoints are
  // harvested.
  bool use_flow = true;
  // Feed the warped box back into the Kalman filter on flow frames.
  bool flow_kalman_update = true;
  double embedding_momentum = 0.9;
};

// Throws InvalidArgument on out-of-range fields.
void validate(const TrackerConfig& config);

// Source of per-frame detections (1-based frame index). Must return the same
// detections for the same index.
class DetectionSource {
 public:
  virtual ~DetectionSource() = default;
  virtual std::vector<Detection> detect(int frame) = 0;
};

class FrameProvider {
 public:
  virtual ~FrameProvider() = default;
  virtual int frame_count() const = 0;
  // 1-based. Throws on failure.
  virtual GrayImage load(int frame) = 0;
};

enum class FrameMode { kKeyframe, kFlow };

struct TrackEntry {
  int id = 0;
  BoundingBox box;
};

struct FrameResult {
  int frame = 0;
  std::vector<TrackEntry> entries;  // ascending id
  FrameMode mode = FrameMode::kKeyframe;
};

struct TrackLog {
  std::vector<FrameResult> frames;
  int detector_invocations = 0;
  int tracks_created = 0;
  std::vector<double> frame_times_ms;
};

inline bool is_keyframe(int frame, int skip) { return (frame - 1) % (skip + 1) == 0; }

// Keyframe/flow scheduler with the track lifecycle. Frames must be fed in
// increasing order starting at 1.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  // Runs the right step for `frame`, consulting `source` on keyframes only.
  FrameResult process(int frame, const GrayImage& image, DetectionSource& source);

  // Detection-driven step: predict, Byte association, lifecycle, keypoint
  // harvesting on `image`.
  FrameResult step_keyframe(int frame, const GrayImage& image,
                            std::span<const Detection> dets);

  // Optical-flow step between two consecutive frames.
  FrameResult step_flow(int frame, const Pyramid& prev, const Pyramid& cur);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return config_; }
  int tracks_created() const { return next_id_ - 1; }
  int detector_invocations() const { return detector_invocations_; }

 private:
  bool harvest_keypoints() const { return config_.use_flow && config_.skip > 0; }
  Pyramid make_pyramid(const GrayImage& image) const;
  FrameResult report(int frame, FrameMode mode) const;

  TrackerConfig config_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  int detector_invocations_ = 0;
  int last_frame_ = 0;
  std::optional<Pyramid> prev_pyramid_;
};

// Raised by run_sequence when a frame cannot be processed; carries the frames
// completed so far.
class SequenceAborted : public Error {
 public:
  SequenceAborted(ErrorKind kind, const std::string& what, TrackLog partial)
      : Error(kind, what), partial_(std::move(partial)) {}
  const TrackLog& partial() const { return partial_; }

 private:
  TrackLog partial_;
};

// Streams every frame of `frames` through a Tracker. Per-frame wall time
// covers loading, detection and the tracking step.
TrackLog run_sequence(FrameProvider& frames, DetectionSource& source,
                      const TrackerConfig& config);

}  // namespace hybridmot

#endif  // HYBRIDMOT_PIPELINE_HPP_
