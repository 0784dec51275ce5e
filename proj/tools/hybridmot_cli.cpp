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

// hybridmot: track / eval / bench / synth front end over the C API.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hybridmot/hybridmot.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitFormat = 2;
constexpr int kExitInternal = 3;

int exit_code(hmot_status s) {
  switch (s) {
    case HMOT_OK:
      return kExitOk;
    case HMOT_ERR_IO:
      return kExitIo;
    case HMOT_ERR_FORMAT:
    case HMOT_ERR_INVALID_ARGUMENT:
      return kExitFormat;
    case HMOT_ERR_INTERNAL:
      break;
  }
  return kExitInternal;
}

int report(hmot_status s) {
  if (s != HMOT_OK) spdlog::error("{}", hmot_last_error());
  return exit_code(s);
}

struct SequenceCloser {
  void operator()(hmot_sequence* s) const { hmot_sequence_close(s); }
};
struct TracklogFreer {
  void operator()(hmot_tracklog* l) const { hmot_tracklog_free(l); }
};
using SequencePtr = std::unique_ptr<hmot_sequence, SequenceCloser>;
using TracklogPtr = std::unique_ptr<hmot_tracklog, TracklogFreer>;

// Shortest round-trip form, always with a decimal point.
std::string metric(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, ec == std::errc() ? ptr : buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("hybridmot");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("HYBRID_MOT_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

struct TrackArgs {
  std::string seq;
  std::string detections;
  std::string embeddings;
  std::string output = "results.txt";
  std::string dump_boxes;
  int skip = 0;
  double tau = 0.5;
  double tau_init = 0.6;
  std::uint64_t seed = 0;
  bool no_flow = false;
  double latency_ms = 0.0;
};

struct EvalArgs {
  std::string gt;
  std::string results;
  double iou_min = 0.5;
};

struct BenchArgs {
  std::string seq;
  std::string detections;
  std::string embeddings;
  std::vector<int> skips{0, 1, 2, 3, 4};
  double latency_ms = 0.0;
  std::string csv;
  std::uint64_t seed = 0;
  bool no_flow = false;
};

struct SynthArgs {
  std::string out;
  std::string scenario = "schedule";
  int frames = 100;
  std::uint64_t seed = 1;
};

hmot_status open_sequence(const std::string& dir, const std::string& dets,
                          const std::string& embs, SequencePtr& out) {
  hmot_sequence* raw = nullptr;
  const hmot_status s =
      hmot_sequence_open(dir.c_str(), dets.empty() ? nullptr : dets.c_str(),
                         embs.empty() ? nullptr : embs.c_str(), &raw);
  out.reset(raw);
  return s;
}

int cmd_track(const TrackArgs& a) {
  SequencePtr seq;
  if (auto s = open_sequence(a.seq, a.detections, a.embeddings, seq); s != HMOT_OK) {
    return report(s);
  }
  hmot_config cfg;
  hmot_config_init(&cfg);
  cfg.skip = a.skip;
  cfg.tau = a.tau;
  cfg.tau_init = a.tau_init;
  cfg.seed = a.seed;
  cfg.use_flow = a.no_flow ? 0 : 1;
  cfg.detector_latency_ms = a.latency_ms;
  spdlog::info("tracking {} with skip={}", a.seq, a.skip);

  hmot_tracklog* raw = nullptr;
  if (auto s = hmot_track(seq.get(), &cfg, &raw); s != HMOT_OK) return report(s);
  TracklogPtr log(raw);
  if (auto s = hmot_tracklog_write_results(log.get(), a.output.c_str()); s != HMOT_OK) {
    return report(s);
  }
  if (!a.dump_boxes.empty()) {
    if (auto s = hmot_tracklog_write_box_dump(log.get(), a.dump_boxes.c_str());
        s != HMOT_OK) {
      return report(s);
    }
  }
  hmot_run_stats st;
  if (auto s = hmot_tracklog_get_stats(log.get(), &st); s != HMOT_OK) return report(s);
  fmt::print("frames={} tracks={} det_calls={} fps={:.2f}\n", st.frames, st.tracks_created,
             st.detector_calls, st.mean_fps);
  return kExitOk;
}

void print_metrics(const hmot_clear_metrics& m) {
  fmt::print("{:<6} {:>10}\n", "metric", "value");
  fmt::print("{:<6} {:>10}\n", "MOTA", metric(m.mota));
  fmt::print("{:<6} {:>10}\n", "MOTP", metric(m.motp));
  fmt::print("{:<6} {:>10}\n", "FP", m.fp);
  fmt::print("{:<6} {:>10}\n", "FN", m.fn);
  fmt::print("{:<6} {:>10}\n", "IDS", m.ids);
  fmt::print("{:<6} {:>10}\n", "GT", m.gt);
  fmt::print("MOTA={} MOTP={} FP={} FN={} IDS={} GT={}\n", metric(m.mota), metric(m.motp),
             m.fp, m.fn, m.ids, m.gt);
}

int cmd_eval(const EvalArgs& a) {
  hmot_clear_metrics m;
  if (auto s = hmot_evaluate_files(a.gt.c_str(), a.results.c_str(), a.iou_min, &m);
      s != HMOT_OK) {
    return report(s);
  }
  print_metrics(m);
  return kExitOk;
}

int cmd_bench(const BenchArgs& a) {
  SequencePtr seq;
  if (auto s = open_sequence(a.seq, a.detections, a.embeddings, seq); s != HMOT_OK) {
    return report(s);
  }
  hmot_sequence_info info;
  if (auto s = hmot_sequence_get_info(seq.get(), &info); s != HMOT_OK) return report(s);

  std::vector<int> skips = a.skips;
  std::sort(skips.begin(), skips.end());
  skips.erase(std::unique(skips.begin(), skips.end()), skips.end());

  std::ostringstream csv;
  csv << "skip,fps,lat_p50_ms,lat_p95_ms,det_calls,mota,motp\n";
  fmt::print("{:>4} {:>9} {:>11} {:>11} {:>9} {:>8} {:>8}\n", "skip", "fps", "p50_ms",
             "p95_ms", "det_calls", "MOTA", "MOTP");
  for (int skip : skips) {
    hmot_config cfg;
    hmot_config_init(&cfg);
    cfg.skip = skip;
    cfg.seed = a.seed;
    cfg.use_flow = a.no_flow ? 0 : 1;
    cfg.detector_latency_ms = a.latency_ms;
    spdlog::info("bench skip={}", skip);
    hmot_tracklog* raw = nullptr;
    if (auto s = hmot_track(seq.get(), &cfg, &raw); s != HMOT_OK) return report(s);
    TracklogPtr log(raw);
    hmot_run_stats st;
    if (auto s = hmot_tracklog_get_stats(log.get(), &st); s != HMOT_OK) return report(s);
    hmot_clear_metrics m{};
    m.mota = m.motp = std::nan("");
    if (info.has_ground_truth) {
      if (auto s = hmot_tracklog_evaluate(log.get(), seq.get(), 0.5, &m); s != HMOT_OK) {
        return report(s);
      }
    }
    fmt::print("{:>4} {:>9.2f} {:>11.3f} {:>11.3f} {:>9} {:>8.4f} {:>8.4f}\n", skip,
               st.mean_fps, st.latency_p50_ms, st.latency_p95_ms, st.detector_calls, m.mota,
               m.motp);
    csv << fmt::format("{},{:.4f},{:.4f},{:.4f},{},{},{}\n", skip, st.mean_fps,
                       st.latency_p50_ms, st.latency_p95_ms, st.detector_calls,
                       metric(m.mota), metric(m.motp));
  }
  if (!a.csv.empty()) {
    std::ofstream out(a.csv, std::ios::binary | std::ios::trunc);
    out << csv.str();
    if (!out) {
      spdlog::error("cannot write {}", a.csv);
      return kExitIo;
    }
  }
  return kExitOk;
}

int cmd_synth(const SynthArgs& a) {
  const hmot_scenario scenario =
      a.scenario == "occlusion" ? HMOT_SCENARIO_OCCLUSION : HMOT_SCENARIO_SCHEDULE;
  if (auto s = hmot_synthesize(scenario, a.frames, a.seed, a.out.c_str()); s != HMOT_OK) {
    return report(s);
  }
  fmt::print("wrote {}\n", a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Hybrid detection / optical-flow multi-object tracker"};
  app.set_version_flag("--version", std::string(hmot_version()));
  app.require_subcommand(1);

  TrackArgs track;
  auto* t = app.add_subcommand("track", "Track a MOT-layout sequence");
  t->add_option("--seq", track.seq, "Sequence directory")->required();
  t->add_option("--detections", track.detections, "Detection file (default det/det.txt)");
  t->add_option("--embeddings", track.embeddings, "Re-ID embedding sidecar");
  t->add_option("--skip", track.skip, "Flow frames per keyframe")->check(CLI::NonNegativeNumber);
  t->add_option("--tau", track.tau, "High/low confidence split")->check(CLI::Range(0.0, 1.0));
  t->add_option("--tau-init", track.tau_init, "Confidence needed to start a track")
      ->check(CLI::Range(0.0, 1.0));
  t->add_option("--seed", track.seed, "Random seed");
  t->add_option("--output", track.output, "Results file")->capture_default_str();
  t->add_flag("--no-flow", track.no_flow, "Coast on the motion model between keyframes");
  t->add_option("--dump-boxes", track.dump_boxes, "Write per-frame box annotations");
  t->add_option("--detector-latency-ms", track.latency_ms, "Simulated keyframe cost")
      ->check(CLI::NonNegativeNumber);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Score a results file against ground truth");
  e->add_option("--gt", eval.gt, "Ground-truth file")->required();
  e->add_option("--results", eval.results, "Results file")->required();
  e->add_option("--iou-min", eval.iou_min, "Match threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Throughput and accuracy across skip values");
  b->add_option("--seq", bench.seq, "Sequence directory")->required();
  b->add_option("--detections", bench.detections, "Detection file (default det/det.txt)");
  b->add_option("--embeddings", bench.embeddings, "Re-ID embedding sidecar");
  b->add_option("--skips", bench.skips, "Comma-separated skip values")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  b->add_option("--detector-latency-ms", bench.latency_ms, "Simulated keyframe cost")
      ->check(CLI::NonNegativeNumber);
  b->add_option("--csv", bench.csv, "Also write the report as CSV");
  b->add_option("--seed", bench.seed, "Random seed");
  b->add_flag("--no-flow", bench.no_flow, "Coast on the motion model between keyframes");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic MOT-layout sequence");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--scenario", synth.scenario, "schedule or occlusion")
      ->check(CLI::IsMember({"schedule", "occlusion"}))
      ->capture_default_str();
  s->add_option("--frames", synth.frames, "Frame count (schedule)")->capture_default_str();
  s->add_option("--seed", synth.seed, "Texture and jitter seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitFormat;
  }

  if (t->parsed()) return cmd_track(track);
  if (e->parsed()) return cmd_eval(eval);
  if (b->parsed()) return cmd_bench(bench);
  if (s->parsed()) return cmd_synth(synth);
  return kExitInternal;
}
