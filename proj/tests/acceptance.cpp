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

// Acceptance suite. Prints one PASS, FAIL or SKIP line per criterion and
// exits non-zero if anything failed.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "hybridmot/association.hpp"
#include "hybridmot/error.hpp"
#include "hybridmot/evaluation.hpp"
#include "hybridmot/features.hpp"
#include "hybridmot/geometry.hpp"
#include "hybridmot/heads.hpp"
#include "hybridmot/motio.hpp"
#include "hybridmot/motion.hpp"
#include "hybridmot/optflow.hpp"
#include "hybridmot/pipeline.hpp"
#include "oracles.hpp"

namespace {

using namespace hybridmot;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  enum Kind { kPass, kFail, kSkip } kind = kFail;
  std::string detail;
};

Verdict pass(std::string d) { return {Verdict::kPass, std::move(d)}; }
Verdict fail(std::string d) { return {Verdict::kFail, std::move(d)}; }
Verdict check(bool ok, std::string d) { return {ok ? Verdict::kPass : Verdict::kFail, std::move(d)}; }

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// 1. Hungarian against brute force.
Verdict assignment_optimality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(1, 7);
  std::uniform_real_distribution<double> cost(0, 100);
  std::bernoulli_distribution forbid(0.2);
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = dim(rng), c = dim(rng);
    const bool sparse = trial % 2 == 1;
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(c)));
    CostMatrix m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) {
        const double v = sparse && forbid(rng) ? kForbidden : cost(rng);
        rows[std::size_t(i)][std::size_t(j)] = v;
        m(std::size_t(i), std::size_t(j)) = v;
      }
    }
    const AssociationOutcome out = hungarian_solve(m);
    const auto best = oracle::brute_force_assignment(rows);
    if (static_cast<int>(out.matches.size()) != best.cardinality ||
        assignment_cost(m, out) != best.cost) {
      return fail("trial " + std::to_string(trial) + ": cost " +
                  num(assignment_cost(m, out)) + " vs brute force " + num(best.cost));
    }
  }
  const double secs = elapsed_s(start);
  return check(secs < 10.0, "1000 matrices up to 7x7 equal brute force, " + num(secs) + " s");
}

// 2. FAST against the per-pixel segment test.
Verdict fast_equivalence() {
  long corners = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GrayImage img = oracle::random_image(64, 64, 1000 + seed);
    const auto got = fast_detect(img, 20, 9, true);
    if (got != oracle::naive_fast(img, 20, 9, true)) {
      return fail("image " + std::to_string(seed) + " differs from the naive oracle");
    }
    corners += static_cast<long>(got.size());
  }
  return check(corners > 0, "50 images identical, " + std::to_string(corners) + " corners");
}

// 3. Pyramidal LK on planted translations.
struct FlowScore {
  int tracked = 0;
  int accurate = 0;
  int total = 0;
};

FlowScore flow_score(int dx, int dy, int levels, double tol, std::uint64_t seed) {
  constexpr int kW = 160, kH = 120, kPad = 32;
  const auto field = oracle::smooth_field(kW + 2 * kPad, kH + 2 * kPad, seed);
  const GrayImage prev = oracle::crop(field, kW + 2 * kPad, kPad, kPad, kW, kH);
  const GrayImage next = oracle::crop(field, kW + 2 * kPad, kPad - dx, kPad - dy, kW, kH);
  std::vector<Keypoint> pts;
  for (int y = 24; y < kH - 24; y += 8) {
    for (int x = 24; x < kW - 24; x += 8) pts.push_back({double(x), double(y), 1});
  }
  FlowParams params;
  params.levels = levels;
  const auto res =
      lk_track_points(build_pyramid(prev, levels), build_pyramid(next, levels), pts, params);
  FlowScore s;
  s.total = static_cast<int>(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (res[i].status != FlowStatus::kTracked) continue;
    ++s.tracked;
    if (std::hypot(res[i].point.x - pts[i].x - dx, res[i].point.y - pts[i].y - dy) <= tol) {
      ++s.accurate;
    }
  }
  return s;
}

Verdict flow_recovery() {
  std::uint64_t seed = 40;
  for (int dy = -8; dy <= 8; dy += 4) {
    for (int dx = -8; dx <= 8; dx += 2) {
      const FlowScore s = flow_score(dx, dy, 3, 0.25, seed++);
      if (s.tracked == 0 || s.accurate < 0.95 * s.tracked) {
        return fail("translation (" + std::to_string(dx) + "," + std::to_string(dy) + "): " +
                    std::to_string(s.accurate) + "/" + std::to_string(s.tracked) +
                    " within 0.25 px");
      }
    }
  }
  const FlowScore one = flow_score(12, 0, 1, 0.5, 7);
  const FlowScore three = flow_score(12, 0, 3, 0.5, 7);
  const bool single_fails = one.accurate < one.total / 2;
  const bool multi_ok = three.tracked > three.total / 2 && three.accurate >= 0.95 * three.tracked;
  return check(single_fails && multi_ok,
               "45 translations within 8 px recovered; 12 px: levels=1 " +
                   std::to_string(one.accurate) + "/" + std::to_string(one.total) +
                   ", levels=3 " + std::to_string(three.accurate) + "/" +
                   std::to_string(three.tracked));
}

// 4. RANSAC with 30% outliers.
Point similarity(Point p) {
  const double a = 1.05 * std::cos(0.1), b = 1.05 * std::sin(0.1);
  return {a * p.x - b * p.y + 2.0, b * p.x + a * p.y - 1.0};
}

Verdict ransac_recovery() {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed * 7919 + 1);
    std::uniform_real_distribution<double> u(0, 100);
    std::vector<Point> src, dst;
    std::vector<bool> inlier;
    for (int i = 0; i < 20; ++i) {
      const Point s{u(rng), u(rng)};
      const Point t = similarity(s);
      Point d = t;
      if (i >= 14) {
        do d = {u(rng), u(rng)};
        while (std::hypot(d.x - t.x, d.y - t.y) < 5.0);
      }
      src.push_back(s);
      dst.push_back(d);
      inlier.push_back(i < 14);
    }
    RansacParams params;
    params.inlier_threshold = 1.0;
    params.seed = seed;
    const RansacResult r = estimate_similarity_ransac(src, dst, params);
    const SimilarityTransform& m = r.transform;
    if (std::abs(m.theta - 0.1) > 0.01 || std::abs(m.scale - 1.05) > 0.01 ||
        std::hypot(m.tx - 2.0, m.ty + 1.0) > 0.5) {
      return fail("seed " + std::to_string(seed) + ": model off");
    }
    for (std::size_t i = 0; i < inlier.size(); ++i) {
      if (!inlier[i] && r.inliers[i]) return fail("seed " + std::to_string(seed) + ": outlier kept");
    }
  }
  return pass("100 seeds recovered, all outliers excluded");
}

// 5. Kalman against dense algebra.
Verdict kalman_equivalence() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0, 600), size(10, 200);
  auto box = [&] { return BoundingBox{pos(rng), pos(rng), size(rng), size(rng)}; };
  auto dense = [](const KalmanState& s) {
    oracle::DenseKalman d;
    for (int i = 0; i < 8; ++i) {
      d.mean[i] = s.mean(i);
      for (int j = 0; j < 8; ++j) d.cov[i][j] = s.covariance(i, j);
    }
    return d;
  };
  double worst = 0.0;
  auto compare = [&](const KalmanState& s, const oracle::DenseKalman& d) {
    for (int i = 0; i < 8; ++i) {
      worst = std::max(worst, std::abs(s.mean(i) - d.mean[i]));
      for (int j = 0; j < 8; ++j) worst = std::max(worst, std::abs(s.covariance(i, j) - d.cov[i][j]));
    }
  };
  for (int chain = 0; chain < 10; ++chain) {
    KalmanState s = kalman_init(box());
    oracle::DenseKalman d = dense(s);
    for (int cycle = 0; cycle < 100; ++cycle) {
      s = kalman_predict(s);
      d = oracle::dense_predict(d);
      compare(s, d);
      const BoundingBox z = box();
      s = kalman_update(s, z);
      d = oracle::dense_update(d, {z.x + z.w / 2, z.y + z.h / 2, z.w / z.h, z.h});
      compare(s, d);
      const oracle::DenseKalman now = dense(s);
      if (!oracle::is_psd(now.cov, 1e-8)) return fail("covariance left PSD cone");
      if ((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
        return fail("covariance asymmetric");
      }
    }
  }
  return check(worst <= 1e-9, "1000 cycles, max deviation " + num(worst));
}

// 6. Loss math.
Verdict loss_math() {
  using namespace heads;
  std::ostringstream why;
  bool ok = true;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      why << what << "; ";
    }
  };
  // Perfect predictions.
  const std::vector<HeatmapCenter> centers{{{2, 3}, 1.5}, {{6, 5}, 1.5}};
  const Heatmap target = render_heatmap_target(centers, 8, 8);
  Heatmap perfect(8, 8);
  for (std::size_t i = 0; i < perfect.values.size(); ++i) {
    perfect.values[i] = target.values[i] == 1.0 ? 1.0 - 1e-12 : 1e-12;
  }
  expect(heatmap_focal_loss(target, perfect) <= 1e-9, "focal perfect");
  BoxRegressionBatch boxes;
  boxes.offsets = boxes.predicted_offsets = {{0.3, 0.7}};
  boxes.sizes = boxes.predicted_sizes = {{12, 30}};
  expect(box_loss(boxes) <= 1e-9, "box perfect");
  IdentityBatch ids;
  ids.labels = ids.probabilities = {{0, 1, 0, 0}};
  expect(identity_loss(ids) <= 1e-9, "identity perfect");
  // Scalar examples.
  expect(std::abs(heatmap_focal_loss(Heatmap(1, 1, 1.0), Heatmap(1, 1, 0.5)) - 0.173287) <= 1e-6,
         "focal single pixel");
  ids.probabilities = {{0.25, 0.25, 0.25, 0.25}};
  expect(std::abs(identity_loss(ids) - std::log(4.0)) <= 1e-9, "identity ln 4");

  // Gradients, 100 random instances per loss.
  constexpr double kStep = 1e-5, kRel = 1e-4, kFloor = 1e-7;
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> unit(0.05, 0.95), wide(-3, 3);
  std::uniform_int_distribution<int> cell(0, 7), cls(0, 4);
  int bad = 0;
  auto fd = [&](double analytic, const std::function<double(double)>& f, double x) {
    if (!oracle::close_relative(analytic, oracle::central_difference(f, x, kStep), kRel, kFloor)) ++bad;
  };
  for (int t = 0; t < 100; ++t) {
    const std::vector<HeatmapCenter> cs{{{double(cell(rng)), double(cell(rng))}, 1.5}};
    const Heatmap m = render_heatmap_target(cs, 8, 8);
    Heatmap p(8, 8);
    for (double& v : p.values) v = unit(rng);
    const auto g = heatmap_focal_loss_grad(m, p);
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      fd(g[i], [&](double v) { Heatmap q = p; q.values[i] = v; return heatmap_focal_loss(m, q); },
         p.values[i]);
    }
  }
  for (int t = 0; t < 100; ++t) {
    BoxRegressionBatch b;
    for (int i = 0; i < 2; ++i) {
      b.offsets.push_back({wide(rng), wide(rng)});
      b.sizes.push_back({wide(rng), wide(rng)});
      b.predicted_offsets.push_back({wide(rng), wide(rng)});
      b.predicted_sizes.push_back({wide(rng), wide(rng)});
    }
    const BoxLossGrad g = box_loss_grad(b);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        fd(g.d_offsets[i][k],
           [&](double v) { auto c = b; c.predicted_offsets[i][k] = v; return box_loss(c); },
           b.predicted_offsets[i][k]);
        fd(g.d_sizes[i][k],
           [&](double v) { auto c = b; c.predicted_sizes[i][k] = v; return box_loss(c); },
           b.predicted_sizes[i][k]);
      }
    }
  }
  for (int t = 0; t < 100; ++t) {
    IdentityBatch b;
    std::vector<double> label(5, 0.0), p(5);
    label[std::size_t(cls(rng))] = 1.0;
    double sum = 0.0;
    for (double& v : p) sum += (v = unit(rng));
    for (double& v : p) v /= sum;
    b.labels = {label};
    b.probabilities = {p};
    const auto g = identity_loss_grad(b);
    for (std::size_t k = 0; k < 5; ++k) {
      fd(g[0][k],
         [&](double v) { auto c = b; c.probabilities[0][k] = v; return identity_loss(c); },
         p[k]);
    }
  }
  for (int t = 0; t < 100; ++t) {
    const double ld = unit(rng) * 5, li = unit(rng) * 5;
    const UncertaintyWeights w{wide(rng), wide(rng)};
    const TotalLossGrad g = total_loss_grad(ld, li, w);
    fd(g.d_l_det, [&](double v) { return total_loss(v, li, w); }, ld);
    fd(g.d_l_id, [&](double v) { return total_loss(ld, v, w); }, li);
    fd(g.d_w1, [&](double v) { return total_loss(ld, li, {v, w.w2}); }, w.w1);
    fd(g.d_w2, [&](double v) { return total_loss(ld, li, {w.w1, v}); }, w.w2);
  }
  expect(bad == 0, std::to_string(bad) + " gradient mismatches");
  return check(ok, ok ? "perfect, scalar and gradient checks hold" : why.str());
}

// 7. CLEAR metrics on a hand-built scenario.
Verdict clear_metrics() {
  auto slot = [](int k, double dx = 0.0) { return BoundingBox{100.0 * k + dx, 0, 10, 10}; };
  SequenceBoxes gt, hyp;
  for (int f = 1; f <= 2; ++f) {
    for (int k = 1; k <= 5; ++k) gt[f].push_back({k, slot(k)});
  }
  hyp[1] = {{1, slot(1, 1)}, {2, slot(2)}, {3, slot(3)}, {4, slot(4)}, {5, slot(5)}};
  hyp[2] = {{1, slot(1)}, {6, slot(2)}, {5, slot(5, 2)}, {7, slot(9)}};
  const ClearCounts c = evaluate_sequence(gt, hyp);
  const double expected_motp = (2.0 / 11.0 + 1.0 / 3.0) / 8.0;
  const ClearCounts p = evaluate_sequence(gt, gt);
  const bool ok = c.gt == 10 && c.fp == 1 && c.fn == 2 && c.ids == 1 &&
                  std::abs(mota(c) - 0.6) < 1e-12 && std::abs(motp(c) - expected_motp) < 1e-15 &&
                  mota(p) == 1.0 && motp(p) == 0.0;
  return check(ok, "MOTA " + num(mota(c)) + ", MOTP " + num(motp(c)) + " (expected " +
                       num(expected_motp) + "), perfect MOTA " + num(mota(p)) + " MOTP " +
                       num(motp(p)));
}

TrackLog run(const SyntheticSequence& seq, const TrackerConfig& cfg, DetectionSource* wrap = nullptr) {
  MemoryFrameProvider frames(seq.frames);
  MemoryDetectionSource source(seq.detections);
  return run_sequence(frames, wrap != nullptr ? *wrap : source, cfg);
}

// 8. Second association stage through an occlusion.
Verdict byte_occlusion() {
  const SyntheticSequence seq = generate_synthetic(occlusion_scenario());
  TrackerConfig two;
  TrackerConfig one;
  one.byte.second_stage = false;
  const ClearCounts a = evaluate_sequence(seq.gt, to_sequence_boxes(run(seq, two)));
  const ClearCounts b = evaluate_sequence(seq.gt, to_sequence_boxes(run(seq, one)));
  return check(a.ids == 0 && b.ids >= 1, "two-stage IDS " + std::to_string(a.ids) +
                                             ", stage-1-only IDS " + std::to_string(b.ids));
}

// 9. Detection schedule trade-off.
class SlowSource : public DetectionSource {
 public:
  SlowSource(const std::map<int, std::vector<Detection>>& dets, double ms) : inner_(dets), ms_(ms) {}
  std::vector<Detection> detect(int frame) override {
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms_));
    return inner_.detect(frame);
  }

 private:
  MemoryDetectionSource inner_;
  double ms_;
};

Verdict hybrid_schedule() {
  const SyntheticSequence seq = generate_synthetic(schedule_scenario(100));
  std::vector<double> fps, motas;
  std::ostringstream table;
  bool ok = true;
  for (int skip = 0; skip <= 4; ++skip) {
    TrackerConfig cfg;
    cfg.skip = skip;
    SlowSource slow(seq.detections, 60.0);
    const TrackLog log = run(seq, cfg, &slow);
    double total_ms = 0.0;
    for (double t : log.frame_times_ms) total_ms += t;
    fps.push_back(1000.0 * double(log.frames.size()) / total_ms);
    motas.push_back(mota(evaluate_sequence(seq.gt, to_sequence_boxes(log))));
    const int expected_calls = (100 + skip) / (skip + 1);
    if (log.detector_invocations != expected_calls) ok = false;
    if (skip <= 3 && motas.back() < 0.9) ok = false;
    table << " skip" << skip << ": calls " << log.detector_invocations << " fps " << num(fps.back())
          << " MOTA " << num(motas.back()) << ";";
  }
  for (std::size_t i = 1; i < fps.size(); ++i) {
    if (!(fps[i] > fps[i - 1])) ok = false;
    if (motas[i] > motas[i - 1]) ok = false;
  }
  return check(ok, table.str());
}

// 10. Determinism through the command-line tool.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism() {
  const fs::path dir = fs::path(HMOT_TEST_DIR) / "acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = std::string("\"") + HMOT_CLI_PATH + "\"";
  const std::string seq = "\"" + (dir / "seq").string() + "\"";
  if (shell(cli + " synth --out " + seq + " --frames 80 > /dev/null") != 0) {
    return fail("synth failed");
  }
  for (const char* name : {"a.txt", "b.txt"}) {
    const std::string cmd = cli + " track --seq " + seq + " --skip 2 --seed 42 --output \"" +
                            (dir / name).string() + "\" > /dev/null";
    if (shell(cmd) != 0) return fail(std::string("track run failed for ") + name);
  }
  const std::string a = slurp(dir / "a.txt"), b = slurp(dir / "b.txt");
  return check(!a.empty() && a == b,
               "two runs, " + std::to_string(a.size()) + " bytes, identical: " + (a == b ? "yes" : "no"));
}

// 11. Real-data smoke run, only when a sequence is provided.
Verdict real_data() {
  const char* env = std::getenv("HYBRID_MOT_MOT15_DIR");
  if (env == nullptr || *env == '\0') {
    return {Verdict::kSkip, "set HYBRID_MOT_MOT15_DIR to a MOT15 sequence directory to run"};
  }
  const fs::path dir(env);
  std::ostringstream out;
  try {
    const motio::SeqInfo info = motio::parse_seqinfo(dir / "seqinfo.ini");
    const auto dets = motio::read_mot_boxes(dir / "det" / "det.txt", motio::BoxKind::kDetections);
    const bool has_gt = fs::exists(dir / "gt" / "gt.txt");
    for (int skip : {0, 2}) {
      motio::ImageDirFrameProvider frames(dir / info.image_dir, info.image_ext, info.seq_length);
      motio::FileDetectionSource source(dets);
      TrackerConfig cfg;
      cfg.skip = skip;
      const TrackLog log = run_sequence(frames, source, cfg);
      if (static_cast<int>(log.frames.size()) != info.seq_length) return fail("incomplete run");
      const fs::path results = fs::path(HMOT_TEST_DIR) / ("mot15_skip" + std::to_string(skip) + ".txt");
      motio::write_results(log, results);
      const auto back = motio::read_mot_boxes(results, motio::BoxKind::kResults);
      out << " skip" << skip << ": " << log.frames.size() << " frames";
      if (has_gt) {
        const auto gt = motio::read_mot_boxes(dir / "gt" / "gt.txt", motio::BoxKind::kGroundTruth);
        const ClearCounts c = evaluate_sequence(to_sequence_boxes(gt), to_sequence_boxes(back));
        out << ", MOTA " << num(mota(c)) << ", MOTP " << num(motp(c));
      }
      out << ";";
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return pass(dir.filename().string() + ":" + out.str());
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "assignment optimality", assignment_optimality},
      {2, "FAST oracle equivalence", fast_equivalence},
      {3, "optical-flow recovery", flow_recovery},
      {4, "RANSAC recovery", ransac_recovery},
      {5, "Kalman oracle equivalence", kalman_equivalence},
      {6, "loss math", loss_math},
      {7, "CLEAR metrics", clear_metrics},
      {8, "two-stage association under occlusion", byte_occlusion},
      {9, "hybrid schedule trade-off", hybrid_schedule},
      {10, "determinism", determinism},
      {11, "real-data smoke run", real_data},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = fail(std::string("exception: ") + e.what());
    }
    const char* tag = v.kind == Verdict::kPass ? "PASS" : v.kind == Verdict::kSkip ? "SKIP" : "FAIL";
    failed += v.kind == Verdict::kFail;
    std::cout << tag << " criterion " << c.number << " (" << c.name << "): " << v.detail << "\n";
  }
  std::cout << (failed == 0 ? "acceptance: all criteria met or skipped\n"
                            : "acceptance: " + std::to_string(failed) + " criterion(s) failed\n");
  return failed == 0 ? 0 : 1;
}
