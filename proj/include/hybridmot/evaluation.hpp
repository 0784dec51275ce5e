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

#ifndef HYBRIDMOT_EVALUATION_HPP_
#define HYBRIDMOT_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "hybridmot/association.hpp"
#include "hybridmot/geometry.hpp"
#include "hybridmot/imgcore.hpp"
#include "hybridmot/motio.hpp"
#include "hybridmot/pipeline.hpp"

namespace hybridmot {

inline constexpr double kDefaultIouMin = 0.5;

struct LabeledBox {
  int id = 0;
  BoundingBox box;
};

using SequenceBoxes = std::map<int, std::vector<LabeledBox>>;

SequenceBoxes to_sequence_boxes(const motio::FrameRecords& records);
SequenceBoxes to_sequence_boxes(const TrackLog& log);

struct ClearCounts {
  long fp = 0;
  long fn = 0;
  long ids = 0;
  long gt = 0;
  long matches = 0;
  // Sum of 1 - IoU over matched pairs.
  double sum_distance = 0.0;

  ClearCounts& operator+=(const ClearCounts& o);
};

enum class ClearEventKind { kFalsePositive, kMiss, kIdSwitch };

struct ClearEvent {
  ClearEventKind kind;
  int gt_id = -1;   // -1 for a false positive
  int hyp_id = -1;  // -1 for a miss
};

struct ClearMatch {
  int gt_id = 0;
  int hyp_id = 0;
  double iou = 0.0;
};

struct FrameMatching {
  std::vector<ClearMatch> matches;  // ascending gt id
  std::vector<ClearEvent> events;
  ClearCounts counts;
};

// Ground-truth id -> hypothesis id it was last matched to.
using IdCarry = std::map<int, int>;

// One frame of CLEAR matching. Carried pairs still overlapping by at least
// iou_min are kept first, the rest are assigned optimally on 1 - IoU. `carry`
// is updated in place. Throws InvalidArgument on a duplicate id in either
// list. The result does not depend on the order of the input lists.
FrameMatching match_frame(std::span<const LabeledBox> gt,
                          std::span<const LabeledBox> hyp, IdCarry& carry,
                          double iou_min = kDefaultIouMin);

// Folds match_frame over the union of frames; a frame missing on one side
// counts as empty.
ClearCounts evaluate_sequence(const SequenceBoxes& gt, const SequenceBoxes& hyp,
                              double iou_min = kDefaultIouMin);

// 1 - (fp + fn + ids) / gt. Throws UndefinedMetric when gt == 0.
double mota(const ClearCounts& c);
// sum_distance / matches. Throws UndefinedMetric when matches == 0.
double motp(const ClearCounts& c);

struct SyntheticObject {
  BoundingBox start;  // box on first_frame
  Point velocity;     // pixels per frame
  int first_frame = 1;
  int last_frame = 0;  // 0: until the end
  // Inclusive frame interval during which the detection confidence drops.
  int occlusion_first = 0;
  int occlusion_last = -1;
  double occlusion_confidence = 0.3;
};

struct SyntheticSpec {
  int frames = 0;
  int width = 320;
  int height = 240;
  std::vector<SyntheticObject> objects;
  std::uint64_t texture_seed = 1;
  std::uint64_t detection_seed = 2;
  double detection_jitter = 1.0;
  double detection_confidence = 0.9;
  float background = 40.0f;
};

struct SyntheticSequence {
  int width = 0;
  int height = 0;
  std::vector<GrayImage> frames;  // frames[t - 1] is frame t
  SequenceBoxes gt;               // object k has id k + 1
  std::map<int, std::vector<Detection>> detections;
};

// Renders noise-textured rectangles over a flat background. Objects are drawn
// in list order, later ones on top. Throws InvalidArgument when an object
// leaves the image during its lifetime or the scenario is malformed.
SyntheticSequence generate_synthetic(const SyntheticSpec& spec);

// 320x240 scene with three objects visible throughout, one entering on frame
// 2, one entering on frame 62 and one leaving after frame 61. Needs
// frames >= 62.
SyntheticSpec schedule_scenario(int frames = 100, std::uint64_t seed = 1);

// Two objects crossing in front of each other. The second appears on frame 9
// with unknown velocity and its detections drop to confidence 0.3 on frames
// 10-12 while the first passes over it. 24 frames.
SyntheticSpec occlusion_scenario(std::uint64_t seed = 1);

class MemoryFrameProvider : public FrameProvider {
 public:
  explicit MemoryFrameProvider(const std::vector<GrayImage>& frames) : frames_(frames) {}
  int frame_count() const override { return static_cast<int>(frames_.size()); }
  GrayImage load(int frame) override;

 private:
  const std::vector<GrayImage>& frames_;
};

class MemoryDetectionSource : public DetectionSource {
 public:
  explicit MemoryDetectionSource(const std::map<int, std::vector<Detection>>& dets)
      : dets_(dets) {}
  std::vector<Detection> detect(int frame) override;

 private:
  const std::map<int, std::vector<Detection>>& dets_;
};

// Writes seqinfo.ini, img1/*.png, gt/gt.txt and det/det.txt under `dir`.
void write_synthetic_sequence(const SyntheticSequence& seq, const std::string& name,
                              const std::filesystem::path& dir);

}  // namespace hybridmot

#endif  // HYBRIDMOT_EVALUATION_HPP_
