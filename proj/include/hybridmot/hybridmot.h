/*
 * Copyright 2026 The hybridmot Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the hybrid detection / optical-flow tracker.
 *
 * Every function returning hmot_status sets a thread-local message readable
 * through hmot_last_error() when it fails. Handles are opaque and must be
 * released with their matching *_close / *_free function. */

#ifndef HYBRIDMOT_HYBRIDMOT_H_
#define HYBRIDMOT_HYBRIDMOT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HMOT_BUILDING_LIBRARY)
#define HMOT_API __declspec(dllexport)
#else
#define HMOT_API __declspec(dllimport)
#endif
#else
#define HMOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hmot_status {
  HMOT_OK = 0,
  HMOT_ERR_IO = 1,
  HMOT_ERR_FORMAT = 2,
  HMOT_ERR_INTERNAL = 3,
  HMOT_ERR_INVALID_ARGUMENT = 4
} hmot_status;

typedef struct hmot_sequence hmot_sequence;
typedef struct hmot_tracklog hmot_tracklog;

typedef struct hmot_config {
  int skip;                /* flow frames per keyframe, >= 0 */
  double tau;              /* high/low confidence split */
  double tau_init;         /* minimum confidence to start a track */
  double min_confidence;   /* detections at or below are discarded */
  uint64_t seed;
  int use_flow;            /* 0: flow frames coast on the motion model */
  int second_stage;        /* 0: drop low-confidence association */
  int keypoint_budget;
  double fast_threshold;
  int max_lost;            /* frames a lost track survives */
  int flow_levels;
  double detector_latency_ms; /* simulated cost charged per keyframe */
} hmot_config;

typedef struct hmot_sequence_info {
  int frame_count;
  int width;
  int height;
  double frame_rate;
  int has_ground_truth;
} hmot_sequence_info;

typedef struct hmot_run_stats {
  int frames;
  int tracks_created;
  int detector_calls;
  double total_ms;
  double mean_fps;
  double latency_p50_ms;
  double latency_p95_ms;
} hmot_run_stats;

typedef struct hmot_clear_metrics {
  long fp;
  long fn;
  long ids;
  long gt;
  long matches;
  double sum_distance;
  double mota; /* NaN when gt == 0 */
  double motp; /* NaN when matches == 0 */
} hmot_clear_metrics;

typedef enum hmot_scenario {
  HMOT_SCENARIO_SCHEDULE = 0, /* textured objects entering and leaving */
  HMOT_SCENARIO_OCCLUSION = 1 /* crossing pair with a confidence dip */
} hmot_scenario;

HMOT_API const char* hmot_version(void);

/* Message of the last failure on the calling thread, "" if none. */
HMOT_API const char* hmot_last_error(void);

HMOT_API void hmot_config_init(hmot_config* config);

/* Opens a MOT-layout directory. `detections` and `embeddings` may be NULL;
 * detections then default to <dir>/det/det.txt. A missing seqinfo.ini is a
 * format error. */
HMOT_API hmot_status hmot_sequence_open(const char* dir, const char* detections,
                                        const char* embeddings, hmot_sequence** out);
HMOT_API void hmot_sequence_close(hmot_sequence* seq);
HMOT_API hmot_status hmot_sequence_get_info(const hmot_sequence* seq,
                                            hmot_sequence_info* out);

/* Runs the tracker over every frame of `seq`. On failure *out stays NULL. */
HMOT_API hmot_status hmot_track(const hmot_sequence* seq, const hmot_config* config,
                                hmot_tracklog** out);
HMOT_API void hmot_tracklog_free(hmot_tracklog* log);

HMOT_API hmot_status hmot_tracklog_get_stats(const hmot_tracklog* log,
                                             hmot_run_stats* out);
HMOT_API int hmot_tracklog_frame_count(const hmot_tracklog* log);
/* Number of reported boxes on the 0-based frame index, -1 if out of range. */
HMOT_API int hmot_tracklog_entry_count(const hmot_tracklog* log, int frame_index);
HMOT_API hmot_status hmot_tracklog_get_entry(const hmot_tracklog* log, int frame_index,
                                             int entry, int* id, double box[4]);

HMOT_API hmot_status hmot_tracklog_write_results(const hmot_tracklog* log,
                                                 const char* path);
HMOT_API hmot_status hmot_tracklog_write_box_dump(const hmot_tracklog* log,
                                                  const char* path);

/* Scores a run against the ground truth of `seq`. */
HMOT_API hmot_status hmot_tracklog_evaluate(const hmot_tracklog* log,
                                            const hmot_sequence* seq, double iou_min,
                                            hmot_clear_metrics* out);

/* Scores a MOT results file against a gt.txt. */
HMOT_API hmot_status hmot_evaluate_files(const char* gt_path, const char* results_path,
                                         double iou_min, hmot_clear_metrics* out);

/* Renders a built-in synthetic scenario as a MOT-layout directory. */
HMOT_API hmot_status hmot_synthesize(hmot_scenario scenario, int frames, uint64_t seed,
                                     const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* HYBRIDMOT_HYBRIDMOT_H_ */
