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

#include "hybridmot/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include "hybridmot/features.hpp"
#include "hybridmot/motion.hpp"

namespace hybridmot {

namespace {

void blend_embedding(Track& track, const Embedding& observed, double momentum) {
  if (!track.embedding || track.embedding->size() != observed.size()) {
    track.embedding = observed;
    return;
  }
  Embedding& e = *track.embedding;
  double norm = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    e[k] = static_cast<float>(momentum * e[k] + (1.0 - momentum) * observed[k]);
    norm += double(e[k]) * e[k];
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (float& v : e) v = static_cast<float>(v / norm);
  }
}

std::uint64_t ransac_seed(std::uint64_t base, int track_id, int frame) {
  return base ^ (0x9E3779B97F4A7C15ULL * std::uint64_t(track_id)) ^
         (0xC2B2AE3D27D4EB4FULL * std::uint64_t(frame));
}

}  // namespace

void validate(const TrackerConfig& c) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (c.skip < 0) throw InvalidArgument("skip must be >= 0");
  if (!unit(c.byte.tau) || !unit(c.byte.tau_init) || !unit(c.byte.min_confidence)) {
    throw InvalidArgument("confidence thresholds must lie in [0, 1]");
  }
  if (c.keypoint_budget < 0) throw InvalidArgument("keypoint budget must be >= 0");
  if (c.max_lost < 0) throw InvalidArgument("max_lost must be >= 0");
  if (!(c.fast_threshold > 0.0)) throw InvalidArgument("FAST threshold must be > 0");
  if (c.flow.levels < 1 || c.flow.window_radius < 2 || !(c.flow.epsilon > 0.0)) {
    throw InvalidArgument("invalid flow parameters");
  }
  if (c.ransac.iterations < 1 || !(c.ransac.inlier_threshold > 0.0) ||
      (c.ransac.min_inliers != 0 && c.ransac.min_inliers < 2)) {
    throw InvalidArgument("invalid RANSAC parameters");
  }
  if (!unit(c.embedding_momentum)) throw InvalidArgument("embedding momentum must lie in [0, 1]");
}

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) { validate(config_); }

Pyramid Tracker::make_pyramid(const GrayImage& image) const {
  return build_pyramid(image, config_.flow.levels);
}

FrameResult Tracker::report(int frame, FrameMode mode) const {
  FrameResult r;
  r.frame = frame;
  r.mode = mode;
  for (const Track& t : tracks_) {
    if (t.state == TrackState::kActive) r.entries.push_back({t.id, t.box});
  }
  std::sort(r.entries.begin(), r.entries.end(),
            [](const TrackEntry& a, const TrackEntry& b) { return a.id < b.id; });
  return r;
}

FrameResult Tracker::process(int frame, const GrayImage& image, DetectionSource& source) {
  if (frame != last_frame_ + 1) {
    throw InvalidArgument("Tracker::process: frames must be consecutive starting at 1");
  }
  FrameResult result;
  if (is_keyframe(frame, config_.skip)) {
    const std::vector<Detection> dets = source.detect(frame);
    ++detector_invocations_;
    result = step_keyframe(frame, image, dets);
    if (harvest_keypoints()) {
      prev_pyramid_ = make_pyramid(image);
    } else {
      prev_pyramid_.reset();
    }
  } else {
    Pyramid cur = harvest_keypoints() ? make_pyramid(image) : Pyramid{{image}};
    if (prev_pyramid_) {
      result = step_flow(frame, *prev_pyramid_, cur);
    } else {
      result = step_flow(frame, cur, cur);
    }
    if (harvest_keypoints()) prev_pyramid_ = std::move(cur);
  }
  last_frame_ = frame;
  return result;
}

FrameResult Tracker::step_keyframe(int frame, const GrayImage& image,
                                   std::span<const Detection> dets) {
  for (Track& t : tracks_) {
    t.kalman = kalman_predict(t.kalman);
    t.box = t.kalman.box();
    ++t.age;
  }

  const ByteOutcome assoc = byte_associate(tracks_, dets, config_.byte);

  for (const auto& [ti, di] : assoc.matches) {
    Track& t = tracks_[ti];
    const Detection& d = dets[di];
    try {
      t.kalman = kalman_update(t.kalman, d.box);
    } catch (const AlgorithmError&) {
      t.kalman = kalman_init(d.box);
    }
    t.box = t.kalman.box();
    if (d.embedding) blend_embedding(t, *d.embedding, config_.embedding_momentum);
    t.state = TrackState::kActive;
    t.frames_since_update = 0;
  }
  for (std::size_t ti : assoc.unmatched_tracks) {
    Track& t = tracks_[ti];
    ++t.frames_since_update;
    t.state = t.frames_since_update > config_.max_lost ? TrackState::kRemoved
                                                       : TrackState::kLost;
  }
  std::erase_if(tracks_, [](const Track& t) { return t.state == TrackState::kRemoved; });

  for (std::size_t di : assoc.new_track_candidates) {
    const Detection& d = dets[di];
    if (!(d.box.w > 0.0) || !(d.box.h > 0.0)) continue;
    Track t;
    t.id = next_id_++;
    t.state = TrackState::kActive;
    t.kalman = kalman_init(d.box);
    t.box = d.box;
    t.embedding = d.embedding;
    tracks_.push_back(std::move(t));
  }

  for (Track& t : tracks_) {
    t.keypoints.clear();
    if (harvest_keypoints() && t.state == TrackState::kActive) {
      t.keypoints = detect_in_box(image, t.box, config_.keypoint_budget,
                                  config_.fast_threshold);
    }
  }
  return report(frame, FrameMode::kKeyframe);
}

FrameResult Tracker::step_flow(int frame, const Pyramid& prev, const Pyramid& cur) {
  for (Track& t : tracks_) {
    ++t.age;
    const KalmanState predicted = kalman_predict(t.kalman);
    if (t.state != TrackState::kActive) {
      t.kalman = predicted;
      t.box = predicted.box();
      ++t.frames_since_update;
      continue;
    }

    bool propagated = false;
    if (config_.use_flow && !t.keypoints.empty()) {
      const std::vector<FlowResult> flow =
          lk_track_points(prev, cur, t.keypoints, config_.flow);
      std::vector<Point> src, dst;
      std::vector<Keypoint> survivors;
      for (std::size_t k = 0; k < flow.size(); ++k) {
        if (flow[k].status != FlowStatus::kTracked) continue;
        src.push_back({t.keypoints[k].x, t.keypoints[k].y});
        dst.push_back(flow[k].point);
        survivors.push_back({flow[k].point.x, flow[k].point.y, t.keypoints[k].score});
      }
      t.keypoints = std::move(survivors);
      if (src.size() >= 2) {
        RansacParams rp = config_.ransac;
        rp.seed = ransac_seed(config_.seed ^ config_.ransac.seed, t.id, frame);
        try {
          const RansacResult fit = estimate_similarity_ransac(src, dst, rp);
          const BoundingBox warped = warp_bbox(t.box, fit.transform);
          if (warped.w > 0.0 && warped.h > 0.0) {
            t.kalman = config_.flow_kalman_update ? kalman_update(predicted, warped)
                                                  : predicted;
            t.box = warped;
            propagated = true;
          }
        } catch (const AlgorithmError&) {
        }
      }
    }
    if (!propagated) {
      t.kalman = predicted;
      t.box = predicted.box();
      ++t.frames_since_update;
    }
  }
  return report(frame, FrameMode::kFlow);
}

TrackLog run_sequence(FrameProvider& frames, DetectionSource& source,
                      const TrackerConfig& config) {
  using Clock = std::chrono::steady_clock;
  Tracker tracker(config);
  TrackLog log;
  const int total = frames.frame_count();
  if (total < 1) throw InvalidArgument("run_sequence: sequence has no frames");
  for (int frame = 1; frame <= total; ++frame) {
    const auto start = Clock::now();
    try {
      const GrayImage image = frames.load(frame);
      log.frames.push_back(tracker.process(frame, image, source));
    } catch (const Error& e) {
      log.detector_invocations = tracker.detector_invocations();
      log.tracks_created = tracker.tracks_created();
      throw SequenceAborted(e.kind(),
                            "frame " + std::to_string(frame) + ": " + e.what(),
                            std::move(log));
    } catch (const std::exception& e) {
      log.detector_invocations = tracker.detector_invocations();
      log.tracks_created = tracker.tracks_created();
      throw SequenceAborted(ErrorKind::kInternal,
                            "frame " + std::to_string(frame) + ": " + e.what(),
                            std::move(log));
    }
    log.frame_times_ms.push_back(
        std::chrono::duration<double, std::milli>(Clock::now() - start).count());
  }
  log.detector_invocations = tracker.detector_invocations();
  log.tracks_created = tracker.tracks_created();
  return log;
}

}  // namespace hybridmot
