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

/* Exercises the shared library from plain C. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hybridmot/hybridmot.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, \
              #cond);                                                \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static void test_errors(void) {
  hmot_sequence* seq = (hmot_sequence*)1;
  CHECK(hmot_sequence_open(HMOT_TEST_DIR "/does-not-exist", NULL, NULL, &seq) ==
        HMOT_ERR_IO);
  CHECK(seq == NULL);
  CHECK(strlen(hmot_last_error()) > 0);
  CHECK(hmot_sequence_open(NULL, NULL, NULL, &seq) == HMOT_ERR_INVALID_ARGUMENT);
  CHECK(hmot_tracklog_frame_count(NULL) == -1);
  CHECK(hmot_synthesize((hmot_scenario)7, 10, 1, HMOT_TEST_DIR "/bad") ==
        HMOT_ERR_INVALID_ARGUMENT);
}

static void test_roundtrip(void) {
  const char* dir = HMOT_TEST_DIR "/capi-schedule";
  const char* results = HMOT_TEST_DIR "/capi-results.txt";
  const char* gt = HMOT_TEST_DIR "/capi-schedule/gt/gt.txt";
  hmot_sequence* seq = NULL;
  hmot_sequence_info info;
  hmot_config cfg;
  hmot_tracklog* log = NULL;
  hmot_run_stats stats;
  hmot_clear_metrics live, from_file;
  int id = 0;
  double box[4];

  CHECK(hmot_synthesize(HMOT_SCENARIO_SCHEDULE, 70, 1, dir) == HMOT_OK);
  CHECK(hmot_sequence_open(dir, NULL, NULL, &seq) == HMOT_OK);
  if (seq == NULL) return;
  CHECK(hmot_sequence_get_info(seq, &info) == HMOT_OK);
  CHECK(info.frame_count == 70);
  CHECK(info.width == 320 && info.height == 240);
  CHECK(info.has_ground_truth == 1);

  hmot_config_init(&cfg);
  CHECK(cfg.skip == 0);
  CHECK(cfg.use_flow == 1);
  cfg.skip = -1;
  CHECK(hmot_track(seq, &cfg, &log) == HMOT_ERR_INVALID_ARGUMENT);
  CHECK(log == NULL);

  cfg.skip = 2;
  CHECK(hmot_track(seq, &cfg, &log) == HMOT_OK);
  if (log != NULL) {
    CHECK(hmot_tracklog_get_stats(log, &stats) == HMOT_OK);
    CHECK(stats.frames == 70);
    CHECK(stats.detector_calls == 24);
    CHECK(stats.mean_fps > 0.0);
    CHECK(hmot_tracklog_frame_count(log) == 70);
    CHECK(hmot_tracklog_entry_count(log, 70) == -1);
    CHECK(hmot_tracklog_entry_count(log, 0) >= 1);
    CHECK(hmot_tracklog_get_entry(log, 0, 0, &id, box) == HMOT_OK);
    CHECK(id >= 1 && box[2] > 0.0 && box[3] > 0.0);
    CHECK(hmot_tracklog_get_entry(log, 0, 999, &id, box) == HMOT_ERR_INVALID_ARGUMENT);

    CHECK(hmot_tracklog_evaluate(log, seq, 0.5, &live) == HMOT_OK);
    CHECK(live.mota >= 0.9);
    CHECK(live.matches + live.fn == live.gt);
    CHECK(hmot_tracklog_write_results(log, results) == HMOT_OK);
    CHECK(hmot_evaluate_files(gt, results, 0.5, &from_file) == HMOT_OK);
    CHECK(from_file.gt == live.gt);
    CHECK(from_file.ids == live.ids);
    CHECK(fabs(from_file.mota - live.mota) < 0.01);
    hmot_tracklog_free(log);
  }
  hmot_sequence_close(seq);
}

int main(void) {
  CHECK(strlen(hmot_version()) > 0);
  test_errors();
  test_roundtrip();
  if (failures != 0) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
