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

#include "hybridmot/hybridmot.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <thread>

#include "hybridmot/error.hpp"
#include "hybridmot/evaluation.hpp"
#include "hybridmot/motio.hpp"
#include "hybridmot/pipeline.hpp"

namespace fs = std::filesystem;
namespace hm = hybridmot;

struct hmot_sequence {
  fs::path dir;
  hm::motio::SeqInfo info;
  hm::motio::FrameRecords detections;
  hm::motio::EmbeddingSidecar embeddings;
  std::optional<hm::SequenceBoxes> ground_truth;
};

struct hmot_tracklog {
  hm::TrackLog log;
};

namespace {

thread_local std::string g_last_error;

hmot_status fail(hmot_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

hmot_status to_status(hm::ErrorKind kind) {
  switch (kind) {
    case hm::ErrorKind::kIo:
      return HMOT_ERR_IO;
    case hm::ErrorKind::kFormat:
      return HMOT_ERR_FORMAT;
    case hm::ErrorKind::kInvalidArgument:
      return HMOT_ERR_INVALID_ARGUMENT;
    case hm::ErrorKind::kInternal:
      break;
  }
  return HMOT_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
hmot_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return HMOT_OK;
  } catch (const hm::Error& e) {
    return fail(to_status(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HMOT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HMOT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HMOT_ERR_INTERNAL, "unknown error");
  }
}

// Charges a fixed wall-clock cost per detector call.
class LatencyDetectionSource : public hm::DetectionSource {
 public:
  LatencyDetectionSource(hm::DetectionSource& inner, double latency_ms)
      : inner_(inner), latency_ms_(latency_ms) {}

  std::vector<hm::Detection> detect(int frame) override {
    if (latency_ms_ > 0.0) {
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(latency_ms_));
    }
    return inner_.detect(frame);
  }

 private:
  hm::DetectionSource& inner_;
  double latency_ms_;
};

hm::TrackerConfig to_tracker_config(const hmot_config& c) {
  hm::TrackerConfig t;
  t.skip = c.skip;
  t.byte.tau = c.tau;
  t.byte.tau_init = c.tau_init;
  t.byte.min_confidence = c.min_confidence;
  t.byte.second_stage = c.second_stage != 0;
  t.seed = c.seed;
  t.use_flow = c.use_flow != 0;
  t.keypoint_budget = c.keypoint_budget;
  t.fast_threshold = c.fast_threshold;
  t.max_lost = c.max_lost;
  t.flow.levels = c.flow_levels;
  return t;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

void fill_metrics(const hm::ClearCounts& c, hmot_clear_metrics* out) {
  out->fp = c.fp;
  out->fn = c.fn;
  out->ids = c.ids;
  out->gt = c.gt;
  out->matches = c.matches;
  out->sum_distance = c.sum_distance;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out->mota = c.gt > 0 ? hm::mota(c) : nan;
  out->motp = c.matches > 0 ? hm::motp(c) : nan;
}

void require(bool ok, const char* what) {
  if (!ok) throw hm::InvalidArgument(what);
}

}  // namespace

extern "C" {

const char* hmot_version(void) { return "0.1.0"; }

const char* hmot_last_error(void) { return g_last_error.c_str(); }

void hmot_config_init(hmot_config* config) {
  if (config == nullptr) return;
  const hm::TrackerConfig d;
  config->skip = d.skip;
  config->tau = d.byte.tau;
  config->tau_init = d.byte.tau_init;
  config->min_confidence = d.byte.min_confidence;
  config->seed = d.seed;
  config->use_flow = d.use_flow ? 1 : 0;
  config->second_stage = d.byte.second_stage ? 1 : 0;
  config->keypoint_budget = d.keypoint_budget;
  config->fast_threshold = d.fast_threshold;
  config->max_lost = d.max_lost;
  config->flow_levels = d.flow.levels;
  config->detector_latency_ms = 0.0;
}

hmot_status hmot_sequence_open(const char* dir, const char* detections,
                               const char* embeddings, hmot_sequence** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(dir != nullptr && out != nullptr, "hmot_sequence_open: null argument");
    auto seq = std::make_unique<hmot_sequence>();
    seq->dir = dir;
    std::error_code ec;
    if (!fs::is_directory(seq->dir, ec)) {
      throw hm::IoError("sequence directory not found: " + seq->dir.string());
    }
    const fs::path ini = seq->dir / "seqinfo.ini";
    if (!fs::exists(ini, ec)) throw hm::FormatError("missing " + ini.string());
    seq->info = hm::motio::parse_seqinfo(ini);

    const fs::path det_path =
        detections != nullptr ? fs::path(detections) : seq->dir / "det" / "det.txt";
    seq->detections = hm::motio::read_mot_boxes(det_path, hm::motio::BoxKind::kDetections);
    if (embeddings != nullptr) seq->embeddings = hm::motio::read_embeddings(embeddings);

    const fs::path gt_path = seq->dir / "gt" / "gt.txt";
    if (fs::exists(gt_path, ec)) {
      seq->ground_truth = hm::to_sequence_boxes(
          hm::motio::read_mot_boxes(gt_path, hm::motio::BoxKind::kGroundTruth));
    }
    *out = seq.release();
  });
}

void hmot_sequence_close(hmot_sequence* seq) { delete seq; }

hmot_status hmot_sequence_get_info(const hmot_sequence* seq, hmot_sequence_info* out) {
  return guarded([&] {
    require(seq != nullptr && out != nullptr, "hmot_sequence_get_info: null argument");
    out->frame_count = seq->info.seq_length;
    out->width = seq->info.width;
    out->height = seq->info.height;
    out->frame_rate = seq->info.frame_rate;
    out->has_ground_truth = seq->ground_truth ? 1 : 0;
  });
}

hmot_status hmot_track(const hmot_sequence* seq, const hmot_config* config,
                       hmot_tracklog** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(seq != nullptr && config != nullptr && out != nullptr,
            "hmot_track: null argument");
    require(config->detector_latency_ms >= 0.0, "detector latency must be >= 0");
    const hm::TrackerConfig tc = to_tracker_config(*config);
    hm::validate(tc);
    hm::motio::ImageDirFrameProvider frames(seq->dir / seq->info.image_dir,
                                            seq->info.image_ext, seq->info.seq_length);
    hm::motio::FileDetectionSource file_source(seq->detections, seq->embeddings);
    LatencyDetectionSource source(file_source, config->detector_latency_ms);
    auto log = std::make_unique<hmot_tracklog>();
    log->log = hm::run_sequence(frames, source, tc);
    *out = log.release();
  });
}

void hmot_tracklog_free(hmot_tracklog* log) { delete log; }

hmot_status hmot_tracklog_get_stats(const hmot_tracklog* log, hmot_run_stats* out) {
  return guarded([&] {
    require(log != nullptr && out != nullptr, "hmot_tracklog_get_stats: null argument");
    const hm::TrackLog& l = log->log;
    out->frames = static_cast<int>(l.frames.size());
    out->tracks_created = l.tracks_created;
    out->detector_calls = l.detector_invocations;
    double total = 0.0;
    for (double t : l.frame_times_ms) total += t;
    out->total_ms = total;
    out->mean_fps = total > 0.0 ? 1000.0 * out->frames / total : 0.0;
    out->latency_p50_ms = percentile(l.frame_times_ms, 0.50);
    out->latency_p95_ms = percentile(l.frame_times_ms, 0.95);
  });
}

int hmot_tracklog_frame_count(const hmot_tracklog* log) {
  return log == nullptr ? -1 : static_cast<int>(log->log.frames.size());
}

int hmot_tracklog_entry_count(const hmot_tracklog* log, int frame_index) {
  if (log == nullptr || frame_index < 0 ||
      frame_index >= static_cast<int>(log->log.frames.size())) {
    return -1;
  }
  return static_cast<int>(log->log.frames[std::size_t(frame_index)].entries.size());
}

hmot_status hmot_tracklog_get_entry(const hmot_tracklog* log, int frame_index, int entry,
                                    int* id, double box[4]) {
  return guarded([&] {
    require(log != nullptr && id != nullptr && box != nullptr,
            "hmot_tracklog_get_entry: null argument");
    const int n = hmot_tracklog_entry_count(log, frame_index);
    require(n >= 0, "hmot_tracklog_get_entry: frame index out of range");
    require(entry >= 0 && entry < n, "hmot_tracklog_get_entry: entry out of range");
    const hm::TrackEntry& e =
        log->log.frames[std::size_t(frame_index)].entries[std::size_t(entry)];
    *id = e.id;
    box[0] = e.box.x;
    box[1] = e.box.y;
    box[2] = e.box.w;
    box[3] = e.box.h;
  });
}

hmot_status hmot_tracklog_write_results(const hmot_tracklog* log, const char* path) {
  return guarded([&] {
    require(log != nullptr && path != nullptr, "hmot_tracklog_write_results: null argument");
    hm::motio::write_results(log->log, path);
  });
}

hmot_status hmot_tracklog_write_box_dump(const hmot_tracklog* log, const char* path) {
  return guarded([&] {
    require(log != nullptr && path != nullptr, "hmot_tracklog_write_box_dump: null argument");
    hm::motio::write_box_dump(log->log, path);
  });
}

hmot_status hmot_tracklog_evaluate(const hmot_tracklog* log, const hmot_sequence* seq,
                                   double iou_min, hmot_clear_metrics* out) {
  return guarded([&] {
    require(log != nullptr && seq != nullptr && out != nullptr,
            "hmot_tracklog_evaluate: null argument");
    if (!seq->ground_truth) {
      throw hm::IoError("no ground truth at " + (seq->dir / "gt" / "gt.txt").string());
    }
    fill_metrics(hm::evaluate_sequence(*seq->ground_truth, hm::to_sequence_boxes(log->log),
                                       iou_min),
                 out);
  });
}

hmot_status hmot_evaluate_files(const char* gt_path, const char* results_path,
                                double iou_min, hmot_clear_metrics* out) {
  return guarded([&] {
    require(gt_path != nullptr && results_path != nullptr && out != nullptr,
            "hmot_evaluate_files: null argument");
    const auto gt = hm::to_sequence_boxes(
        hm::motio::read_mot_boxes(gt_path, hm::motio::BoxKind::kGroundTruth));
    const auto hyp = hm::to_sequence_boxes(
        hm::motio::read_mot_boxes(results_path, hm::motio::BoxKind::kResults));
    fill_metrics(hm::evaluate_sequence(gt, hyp, iou_min), out);
  });
}

hmot_status hmot_synthesize(hmot_scenario scenario, int frames, uint64_t seed,
                            const char* dir) {
  return guarded([&] {
    require(dir != nullptr, "hmot_synthesize: null argument");
    hm::SyntheticSpec spec;
    std::string name;
    switch (scenario) {
      case HMOT_SCENARIO_SCHEDULE:
        spec = hm::schedule_scenario(frames, seed);
        name = "SYNTH-SCHEDULE";
        break;
      case HMOT_SCENARIO_OCCLUSION:
        spec = hm::occlusion_scenario(seed);
        name = "SYNTH-OCCLUSION";
        break;
      default:
        throw hm::InvalidArgument("hmot_synthesize: unknown scenario");
    }
    hm::write_synthetic_sequence(hm::generate_synthetic(spec), name, dir);
  });
}

}  // extern "C"
