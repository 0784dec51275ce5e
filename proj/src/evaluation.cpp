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

#include "hybridmot/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "hybridmot/error.hpp"

namespace hybridmot {

namespace {

std::vector<LabeledBox> sorted_by_id(std::span<const LabeledBox> boxes, const char* side) {
  std::vector<LabeledBox> out(boxes.begin(), boxes.end());
  std::sort(out.begin(), out.end(),
            [](const LabeledBox& a, const LabeledBox& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].id == out[i - 1].id) {
      throw InvalidArgument(std::string("match_frame: duplicate ") + side + " id " +
                            std::to_string(out[i].id));
    }
  }
  return out;
}

void append_shortest(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw AlgorithmError("cannot format number");
  out.append(buf, ptr);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

bool in_bounds(const BoundingBox& b, int width, int height) {
  return b.x >= 0.0 && b.y >= 0.0 && b.w > 0.0 && b.h > 0.0 && b.right() <= width &&
         b.bottom() <= height;
}

// Lattice of random intensities with 4 px spacing, interpolated bilinearly in
// object-local coordinates so the pattern moves rigidly with the box.
struct Texture {
  static constexpr double kCell = 4.0;
  int cols = 0;
  int rows = 0;
  std::vector<float> lattice;

  double sample(double u, double v) const {
    const double gu = std::clamp(u / kCell, 0.0, double(cols - 1));
    const double gv = std::clamp(v / kCell, 0.0, double(rows - 1));
    const int i0 = std::min(static_cast<int>(gu), cols - 2);
    const int j0 = std::min(static_cast<int>(gv), rows - 2);
    const double fu = gu - i0;
    const double fv = gv - j0;
    auto at = [&](int i, int j) { return double(lattice[std::size_t(j) * cols + i]); };
    const double top = (1 - fu) * at(i0, j0) + fu * at(i0 + 1, j0);
    const double bot = (1 - fu) * at(i0, j0 + 1) + fu * at(i0 + 1, j0 + 1);
    return (1 - fv) * top + fv * bot;
  }
};

}  // namespace

ClearCounts& ClearCounts::operator+=(const ClearCounts& o) {
  fp += o.fp;
  fn += o.fn;
  ids += o.ids;
  gt += o.gt;
  matches += o.matches;
  sum_distance += o.sum_distance;
  return *this;
}

SequenceBoxes to_sequence_boxes(const motio::FrameRecords& records) {
  SequenceBoxes out;
  for (const auto& [frame, recs] : records) {
    auto& dst = out[frame];
    for (const motio::MotRecord& r : recs) dst.push_back({r.id, r.box});
  }
  return out;
}

SequenceBoxes to_sequence_boxes(const TrackLog& log) {
  SequenceBoxes out;
  for (const FrameResult& f : log.frames) {
    auto& dst = out[f.frame];
    for (const TrackEntry& e : f.entries) dst.push_back({e.id, e.box});
  }
  return out;
}

FrameMatching match_frame(std::span<const LabeledBox> gt_in,
                          std::span<const LabeledBox> hyp_in, IdCarry& carry,
                          double iou_min) {
  if (!(iou_min > 0.0) || iou_min > 1.0) {
    throw InvalidArgument("match_frame: iou_min must lie in (0, 1]");
  }
  const std::vector<LabeledBox> gt = sorted_by_id(gt_in, "ground-truth");
  const std::vector<LabeledBox> hyp = sorted_by_id(hyp_in, "hypothesis");

  FrameMatching out;
  std::vector<bool> gt_used(gt.size(), false);
  std::vector<bool> hyp_used(hyp.size(), false);
  std::map<int, std::size_t> hyp_index;
  for (std::size_t j = 0; j < hyp.size(); ++j) hyp_index[hyp[j].id] = j;

  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto c = carry.find(gt[i].id);
    if (c == carry.end()) continue;
    const auto h = hyp_index.find(c->second);
    if (h == hyp_index.end() || hyp_used[h->second]) continue;
    const double overlap = iou(gt[i].box, hyp[h->second].box);
    if (overlap < iou_min) continue;
    gt_used[i] = true;
    hyp_used[h->second] = true;
    out.matches.push_back({gt[i].id, hyp[h->second].id, overlap});
  }

  std::vector<std::size_t> gi, hj;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_used[i]) gi.push_back(i);
  }
  for (std::size_t j = 0; j < hyp.size(); ++j) {
    if (!hyp_used[j]) hj.push_back(j);
  }
  CostMatrix costs(gi.size(), hj.size(), kForbidden);
  for (std::size_t r = 0; r < gi.size(); ++r) {
    for (std::size_t c = 0; c < hj.size(); ++c) {
      const double overlap = iou(gt[gi[r]].box, hyp[hj[c]].box);
      if (overlap >= iou_min) costs(r, c) = 1.0 - overlap;
    }
  }
  const AssociationOutcome assign = hungarian_solve(costs);
  for (const auto& [r, c] : assign.matches) {
    const LabeledBox& g = gt[gi[r]];
    const LabeledBox& h = hyp[hj[c]];
    gt_used[gi[r]] = true;
    hyp_used[hj[c]] = true;
    const auto prev = carry.find(g.id);
    if (prev != carry.end() && prev->second != h.id) {
      out.events.push_back({ClearEventKind::kIdSwitch, g.id, h.id});
      ++out.counts.ids;
    }
    out.matches.push_back({g.id, h.id, 1.0 - costs(r, c)});
  }

  for (const ClearMatch& m : out.matches) {
    carry[m.gt_id] = m.hyp_id;
    out.counts.sum_distance += 1.0 - m.iou;
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const ClearMatch& a, const ClearMatch& b) { return a.gt_id < b.gt_id; });
  out.counts.matches = static_cast<long>(out.matches.size());
  out.counts.gt = static_cast<long>(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt_used[i]) continue;
    out.events.push_back({ClearEventKind::kMiss, gt[i].id, -1});
    ++out.counts.fn;
  }
  for (std::size_t j = 0; j < hyp.size(); ++j) {
    if (hyp_used[j]) continue;
    out.events.push_back({ClearEventKind::kFalsePositive, -1, hyp[j].id});
    ++out.counts.fp;
  }
  return out;
}

ClearCounts evaluate_sequence(const SequenceBoxes& gt, const SequenceBoxes& hyp,
                              double iou_min) {
  std::set<int> frames;
  for (const auto& [f, boxes] : gt) frames.insert(f);
  for (const auto& [f, boxes] : hyp) frames.insert(f);
  static const std::vector<LabeledBox> kEmpty;
  IdCarry carry;
  ClearCounts total;
  for (int f : frames) {
    const auto g = gt.find(f);
    const auto h = hyp.find(f);
    total += match_frame(g == gt.end() ? kEmpty : g->second,
                         h == hyp.end() ? kEmpty : h->second, carry, iou_min)
                 .counts;
  }
  return total;
}

double mota(const ClearCounts& c) {
  if (c.gt <= 0) throw UndefinedMetric("MOTA is undefined without ground-truth boxes");
  return 1.0 - double(c.fp + c.fn + c.ids) / double(c.gt);
}

double motp(const ClearCounts& c) {
  if (c.matches <= 0) throw UndefinedMetric("MOTP is undefined without matches");
  return c.sum_distance / double(c.matches);
}

SyntheticSequence generate_synthetic(const SyntheticSpec& spec) {
  if (spec.frames < 0) throw InvalidArgument("synthetic: frame count must be >= 0");
  if (spec.width < 8 || spec.height < 8) throw InvalidArgument("synthetic: image too small");
  if (!(spec.detection_jitter >= 0.0)) throw InvalidArgument("synthetic: jitter must be >= 0");

  SyntheticSequence seq;
  seq.width = spec.width;
  seq.height = spec.height;

  std::mt19937_64 tex_rng(spec.texture_seed);
  std::uniform_real_distribution<float> tex_value(110.0f, 255.0f);
  std::vector<Texture> textures;
  for (std::size_t k = 0; k < spec.objects.size(); ++k) {
    const SyntheticObject& o = spec.objects[k];
    const int last = o.last_frame == 0 ? spec.frames : o.last_frame;
    if (o.first_frame < 1 || last < o.first_frame || last > spec.frames) {
      throw InvalidArgument("synthetic: object " + std::to_string(k + 1) +
                            " has an invalid lifetime");
    }
    Texture t;
    t.cols = static_cast<int>(std::ceil(o.start.w / Texture::kCell)) + 2;
    t.rows = static_cast<int>(std::ceil(o.start.h / Texture::kCell)) + 2;
    t.lattice.resize(std::size_t(t.cols) * t.rows);
    for (float& v : t.lattice) v = tex_value(tex_rng);
    textures.push_back(std::move(t));
  }

  std::mt19937_64 det_rng(spec.detection_seed);
  std::normal_distribution<double> jitter(0.0, 1.0);

  for (int frame = 1; frame <= spec.frames; ++frame) {
    GrayImage img(spec.width, spec.height, spec.background);
    for (std::size_t k = 0; k < spec.objects.size(); ++k) {
      const SyntheticObject& o = spec.objects[k];
      const int last = o.last_frame == 0 ? spec.frames : o.last_frame;
      if (frame < o.first_frame || frame > last) continue;
      const double dt = frame - o.first_frame;
      const BoundingBox box{o.start.x + o.velocity.x * dt, o.start.y + o.velocity.y * dt,
                            o.start.w, o.start.h};
      if (!in_bounds(box, spec.width, spec.height)) {
        throw InvalidArgument("synthetic: object " + std::to_string(k + 1) +
                              " leaves the image at frame " + std::to_string(frame));
      }
      seq.gt[frame].push_back({static_cast<int>(k) + 1, box});

      const int x0 = static_cast<int>(std::ceil(box.x));
      const int y0 = static_cast<int>(std::ceil(box.y));
      for (int y = y0; y < box.bottom() && y < spec.height; ++y) {
        for (int x = x0; x < box.right() && x < spec.width; ++x) {
          img.at(x, y) = static_cast<float>(
              std::round(textures[k].sample(x - box.x, y - box.y)));
        }
      }

      const bool occluded = frame >= o.occlusion_first && frame <= o.occlusion_last;
      Detection d;
      d.box = {box.x + spec.detection_jitter * jitter(det_rng),
               box.y + spec.detection_jitter * jitter(det_rng),
               box.w + spec.detection_jitter * jitter(det_rng),
               box.h + spec.detection_jitter * jitter(det_rng)};
      d.confidence = occluded ? o.occlusion_confidence : spec.detection_confidence;
      seq.detections[frame].push_back(std::move(d));
    }
    seq.frames.push_back(std::move(img));
  }
  return seq;
}

SyntheticSpec schedule_scenario(int frames, std::uint64_t seed) {
  if (frames < 62) throw InvalidArgument("schedule scenario needs at least 62 frames");
  SyntheticSpec s;
  s.frames = frames;
  s.width = 320;
  s.height = 240;
  s.texture_seed = seed;
  s.detection_seed = seed + 1;
  // Horizontal lanes keep the objects apart.
  const double span = frames - 1;
  s.objects.push_back({{10, 15, 48, 60}, {150.0 / span, 0.0}});
  s.objects.push_back({{260, 95, 44, 60}, {-120.0 / span, 10.0 / span}});
  s.objects.push_back({{30, 172, 52, 56}, {100.0 / span, 5.0 / span}});
  s.objects.push_back({{200, 20, 40, 52}, {0.5, 0.2}, 2});
  s.objects.push_back({{60, 100, 40, 50}, {0.4, 0.1}, 62});
  s.objects.push_back({{150, 175, 40, 50}, {0.5, 0.0}, 1, 61});
  return s;
}

SyntheticSpec occlusion_scenario(std::uint64_t seed) {
  SyntheticSpec s;
  s.frames = 24;
  s.width = 320;
  s.height = 200;
  s.texture_seed = seed;
  s.detection_seed = seed + 1;
  SyntheticObject b{{159, 65, 40, 60}, {8.0, 0.0}, 9};
  b.occlusion_first = 10;
  b.occlusion_last = 12;
  b.occlusion_confidence = 0.3;
  // Drawn first so that the occluder covers it.
  s.objects.push_back(b);
  s.objects.push_back({{250, 60, 50, 70}, {-8.0, 0.0}});
  return s;
}

GrayImage MemoryFrameProvider::load(int frame) {
  if (frame < 1 || frame > frame_count()) {
    throw InvalidArgument("frame " + std::to_string(frame) + " out of range");
  }
  return frames_[std::size_t(frame - 1)];
}

std::vector<Detection> MemoryDetectionSource::detect(int frame) {
  const auto it = dets_.find(frame);
  return it == dets_.end() ? std::vector<Detection>{} : it->second;
}

void write_synthetic_sequence(const SyntheticSequence& seq, const std::string& name,
                              const std::filesystem::path& dir) {
  std::error_code ec;
  for (const char* sub : {"img1", "gt", "det"}) {
    std::filesystem::create_directories(dir / sub, ec);
    if (ec) throw IoError("cannot create " + (dir / sub).string() + ": " + ec.message());
  }
  write_text("[Sequence]\nname=" + name + "\nimDir=img1\nframeRate=30\nseqLength=" +
                 std::to_string(seq.frames.size()) + "\nimWidth=" + std::to_string(seq.width) +
                 "\nimHeight=" + std::to_string(seq.height) + "\nimExt=.png\n",
             dir / "seqinfo.ini");

  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    char file[32];
    std::snprintf(file, sizeof(file), "%06zu.png", t + 1);
    motio::write_gray_image(seq.frames[t], dir / "img1" / file);
  }

  auto append_box = [](std::string& s, const BoundingBox& b) {
    for (double v : {b.x, b.y, b.w, b.h}) {
      s += ',';
      append_shortest(s, v);
    }
  };
  std::string gt;
  for (const auto& [frame, boxes] : seq.gt) {
    for (const LabeledBox& b : boxes) {
      gt += std::to_string(frame) + ',' + std::to_string(b.id);
      append_box(gt, b.box);
      gt += ",1,1,1\n";
    }
  }
  write_text(gt, dir / "gt" / "gt.txt");

  std::string det;
  for (const auto& [frame, dets] : seq.detections) {
    for (const Detection& d : dets) {
      det += std::to_string(frame) + ",-1";
      append_box(det, d.box);
      det += ',';
      append_shortest(det, d.confidence);
      det += ",-1,-1,-1\n";
    }
  }
  write_text(det, dir / "det" / "det.txt");
}

}  // namespace hybridmot
