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

#include "hybridmot/motio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>

#include <opencv2/imgcodecs.hpp>

#include "hybridmot/error.hpp"

namespace hybridmot::motio {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Locale-independent number parsing; the whole field must be consumed.
template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

// Integer columns sometimes arrive as "1.0" or "-1.000".
std::optional<int> parse_integral(std::string_view s) {
  if (auto i = parse_number<int>(s)) return i;
  if (auto d = parse_number<double>(s)) {
    if (*d == std::floor(*d) && std::abs(*d) < 2e9) return static_cast<int>(*d);
  }
  return std::nullopt;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void append_fixed2(std::string& out, double v) {
  // Collapse -0.00 to 0.00.
  if (std::abs(v) < 0.005) v = 0.0;
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  if (ec != std::errc()) throw AlgorithmError("cannot format number");
  out.append(buf, ptr);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

SeqInfo parse_seqinfo(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::map<std::string, std::string, std::less<>> keys;
  bool in_sequence = false;
  bool saw_sequence = false;
  std::istringstream lines(text);
  std::string raw;
  while (std::getline(lines, raw)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == ';' || line.front() == '#') continue;
    if (line.front() == '[') {
      const std::size_t close = line.find(']');
      const std::string_view section = trim(line.substr(1, close == std::string_view::npos
                                                               ? std::string_view::npos
                                                               : close - 1));
      in_sequence = section == "Sequence";
      saw_sequence = saw_sequence || in_sequence;
      continue;
    }
    if (!in_sequence) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    keys[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  if (!saw_sequence) {
    throw FormatError(path.string() + ": missing [Sequence] section");
  }
  auto require = [&](const char* key) -> const std::string& {
    const auto it = keys.find(key);
    if (it == keys.end() || it->second.empty()) {
      throw FormatError(path.string() + ": missing required key '" + key + "'");
    }
    return it->second;
  };
  auto require_int = [&](const char* key) {
    const auto v = parse_integral(require(key));
    if (!v) throw FormatError(path.string() + ": key '" + key + "' is not an integer");
    return *v;
  };

  SeqInfo info;
  const auto name = keys.find("name");
  info.name = name != keys.end() ? name->second
                                 : path.parent_path().filename().string();
  info.image_dir = require("imDir");
  const auto rate = parse_number<double>(require("frameRate"));
  if (!rate || *rate <= 0.0) throw FormatError(path.string() + ": key 'frameRate' is invalid");
  info.frame_rate = *rate;
  info.seq_length = require_int("seqLength");
  info.width = require_int("imWidth");
  info.height = require_int("imHeight");
  info.image_ext = require("imExt");
  if (info.seq_length < 1) throw FormatError(path.string() + ": key 'seqLength' must be >= 1");
  if (info.width < 1) throw FormatError(path.string() + ": key 'imWidth' must be >= 1");
  if (info.height < 1) throw FormatError(path.string() + ": key 'imHeight' must be >= 1");
  return info;
}

FrameRecords parse_mot_boxes(const std::string& text, BoxKind kind,
                             const ReadOptions& options, const std::string& origin) {
  FrameRecords out;
  std::istringstream lines(text);
  std::string raw;
  int line_no = 0;
  double min_conf = std::numeric_limits<double>::infinity();
  double max_conf = -std::numeric_limits<double>::infinity();
  while (std::getline(lines, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    auto fail = [&](const std::string& why) {
      throw FormatError(origin + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() < 7) fail("expected at least 7 comma-separated fields");
    MotRecord r;
    const auto frame = parse_integral(fields[0]);
    const auto id = parse_integral(fields[1]);
    if (!frame || !id) fail("frame and id must be integers");
    if (*frame < 1) fail("frame must be >= 1");
    r.frame = *frame;
    r.id = *id;
    double vals[5];
    for (std::size_t k = 0; k < 5; ++k) {
      const auto v = parse_number<double>(fields[2 + k]);
      if (!v) fail("malformed number '" + std::string(fields[2 + k]) + "'");
      vals[k] = *v;
    }
    r.box = {vals[0], vals[1], vals[2], vals[3]};
    r.conf = vals[4];
    for (std::size_t k = 0; k < 3 && 7 + k < fields.size(); ++k) {
      const auto v = parse_number<double>(fields[7 + k]);
      if (!v) fail("malformed number '" + std::string(fields[7 + k]) + "'");
      r.world[k] = *v;
    }
    if (kind == BoxKind::kGroundTruth && r.conf == 0.0) continue;
    min_conf = std::min(min_conf, r.conf);
    max_conf = std::max(max_conf, r.conf);
    out[r.frame].push_back(r);
  }
  if (kind == BoxKind::kDetections && options.normalize_confidence && max_conf > 1.0) {
    const double range = max_conf - min_conf;
    for (auto& [frame, recs] : out) {
      for (MotRecord& r : recs) {
        const double scaled = range > 0.0 ? (r.conf - min_conf) / range : 1.0;
        r.conf = std::clamp(scaled, 0.0, 1.0);
      }
    }
  } else if (kind == BoxKind::kDetections) {
    for (auto& [frame, recs] : out) {
      for (MotRecord& r : recs) r.conf = std::clamp(r.conf, 0.0, 1.0);
    }
  }
  return out;
}

FrameRecords read_mot_boxes(const std::filesystem::path& path, BoxKind kind,
                            const ReadOptions& options) {
  return parse_mot_boxes(read_file(path), kind, options, path.string());
}

const Embedding* EmbeddingSidecar::find(int frame, int ordinal) const {
  const auto it = vectors_.find({frame, ordinal});
  return it == vectors_.end() ? nullptr : &it->second;
}

void EmbeddingSidecar::insert(int frame, int ordinal, Embedding v) {
  if (dim_ == 0) dim_ = v.size();
  if (v.size() != dim_) throw FormatError("embedding dimension mismatch");
  vectors_[{frame, ordinal}] = std::move(v);
}

EmbeddingSidecar parse_embeddings(const std::string& text, const std::string& origin) {
  EmbeddingSidecar sidecar;
  std::istringstream lines(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw FormatError(origin + ":" + std::to_string(line_no) + ": " + why);
    };
    const auto fields = split(line, ',');
    if (fields.size() < 3) fail("expected frame,ordinal and at least one component");
    const auto frame = parse_integral(fields[0]);
    const auto ordinal = parse_integral(fields[1]);
    if (!frame || !ordinal || *frame < 1 || *ordinal < 0) fail("bad frame or ordinal");
    const std::size_t dim = fields.size() - 2;
    if (sidecar.dim_ != 0 && dim != sidecar.dim_) {
      fail("expected " + std::to_string(sidecar.dim_) + " components, got " +
           std::to_string(dim));
    }
    std::vector<double> v(dim);
    double norm = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const auto x = parse_number<double>(fields[2 + k]);
      if (!x) fail("malformed number '" + std::string(fields[2 + k]) + "'");
      v[k] = *x;
      norm += *x * *x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) fail("zero embedding vector");
    Embedding e(dim);
    for (std::size_t k = 0; k < dim; ++k) e[k] = static_cast<float>(v[k] / norm);
    sidecar.dim_ = dim;
    sidecar.vectors_[{*frame, *ordinal}] = std::move(e);
  }
  return sidecar;
}

EmbeddingSidecar read_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path), path.string());
}

std::string format_results(const TrackLog& log) {
  std::vector<std::pair<int, const TrackEntry*>> rows;
  for (const FrameResult& f : log.frames) {
    for (const TrackEntry& e : f.entries) rows.emplace_back(f.frame, &e);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->id < b.second->id;
  });
  std::string out;
  for (const auto& [frame, e] : rows) {
    out += std::to_string(frame);
    out += ',';
    out += std::to_string(e->id);
    for (double v : {e->box.x, e->box.y, e->box.w, e->box.h}) {
      out += ',';
      append_fixed2(out, v);
    }
    out += ",1,-1,-1,-1\n";
  }
  return out;
}

void write_results(const TrackLog& log, const std::filesystem::path& path) {
  write_text(format_results(log), path);
}

void write_box_dump(const TrackLog& log, const std::filesystem::path& path) {
  std::string out;
  for (const FrameResult& f : log.frames) {
    for (const TrackEntry& e : f.entries) {
      out += std::to_string(f.frame);
      out += f.mode == FrameMode::kKeyframe ? " keyframe " : " flow ";
      out += std::to_string(e.id);
      for (double v : {e.box.x, e.box.y, e.box.w, e.box.h}) {
        out += ' ';
        append_fixed2(out, v);
      }
      out += '\n';
    }
  }
  write_text(out, path);
}

FileDetectionSource::FileDetectionSource(FrameRecords records, EmbeddingSidecar sidecar)
    : records_(std::move(records)), sidecar_(std::move(sidecar)) {}

std::vector<Detection> FileDetectionSource::detect(int frame) {
  std::vector<Detection> out;
  const auto it = records_.find(frame);
  if (it == records_.end()) return out;
  int ordinal = 0;
  for (const MotRecord& r : it->second) {
    Detection d;
    d.box = r.box;
    d.confidence = r.conf;
    if (const Embedding* e = sidecar_.find(frame, ordinal)) d.embedding = *e;
    out.push_back(std::move(d));
    ++ordinal;
  }
  return out;
}

ImageDirFrameProvider::ImageDirFrameProvider(std::filesystem::path image_dir,
                                             std::string ext, int frame_count)
    : dir_(std::move(image_dir)), ext_(std::move(ext)), frame_count_(frame_count) {}

std::filesystem::path ImageDirFrameProvider::frame_path(int frame) const {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d", frame);
  return dir_ / (std::string(name) + ext_);
}

GrayImage ImageDirFrameProvider::load(int frame) {
  return to_grayscale(read_color_image(frame_path(frame)));
}

ColorImage read_color_image(const std::filesystem::path& path) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw IoError("cannot read image " + path.string());
  ColorImage img;
  img.width = bgr.cols;
  img.height = bgr.rows;
  img.rgb.resize(std::size_t(img.width) * std::size_t(img.height) * 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const std::uint8_t* src = bgr.ptr<std::uint8_t>(y);
    std::uint8_t* dst = img.rgb.data() + std::size_t(y) * img.width * 3;
    for (int x = 0; x < bgr.cols; ++x) {
      dst[3 * x] = src[3 * x + 2];
      dst[3 * x + 1] = src[3 * x + 1];
      dst[3 * x + 2] = src[3 * x];
    }
  }
  return img;
}

void write_gray_image(const GrayImage& img, const std::filesystem::path& path) {
  cv::Mat m(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < img.height(); ++y) {
    std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      row[x] = static_cast<std::uint8_t>(std::clamp(std::lround(img.at(x, y)), 0L, 255L));
    }
  }
  if (!cv::imwrite(path.string(), m)) throw IoError("cannot write image " + path.string());
}

}  // namespace hybridmot::motio
