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

#ifndef HYBRIDMOT_MOTIO_HPP_
#define HYBRIDMOT_MOTIO_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hybridmot/association.hpp"
#include "hybridmot/geometry.hpp"
#include "hybridmot/imgcore.hpp"
#include "hybridmot/pipeline.hpp"

// MOT-Challenge sequence layout:
//   <seq>/seqinfo.ini, <seq>/det/det.txt, <seq>/gt/gt.txt,
//   <seq>/<imDir>/000001<imExt> ...
namespace hybridmot::motio {

struct SeqInfo {
  std::string name;
  std::string image_dir;
  double frame_rate = 0.0;
  int seq_length = 0;
  int width = 0;
  int height = 0;
  std::string image_ext;
};

// Throws IoError when the file cannot be opened and FormatError (naming the
// key) when a required key is missing or malformed.
SeqInfo parse_seqinfo(const std::filesystem::path& path);

struct MotRecord {
  int frame = 0;
  int id = -1;
  BoundingBox box;
  double conf = 0.0;
  double world[3] = {-1.0, -1.0, -1.0};
};

enum class BoxKind { kDetections, kGroundTruth, kResults };

struct ReadOptions {
  // Detections only: min-max rescale confidences when the file's maximum
  // exceeds 1.
  bool normalize_confidence = true;
};

// Records grouped by frame with file order kept inside each frame.
using FrameRecords = std::map<int, std::vector<MotRecord>>;

// Ground truth drops rows whose conf column is 0. Throws FormatError with the
// line number on malformed input.
FrameRecords read_mot_boxes(const std::filesystem::path& path, BoxKind kind,
                            const ReadOptions& options = {});

// Same parser over in-memory text; `origin` labels error messages.
FrameRecords parse_mot_boxes(const std::string& text, BoxKind kind,
                             const ReadOptions& options = {},
                             const std::string& origin = "<memory>");

// Keyed by (frame, ordinal of the detection within its frame).
class EmbeddingSidecar {
 public:
  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  const Embedding* find(int frame, int ordinal) const;
  void insert(int frame, int ordinal, Embedding v);

 private:
  friend EmbeddingSidecar parse_embeddings(const std::string&, const std::string&);
  std::size_t dim_ = 0;
  std::map<std::pair<int, int>, Embedding> vectors_;
};

// Lines "frame,ordinal,v0,...,v{D-1}"; vectors are L2-normalised on load.
EmbeddingSidecar read_embeddings(const std::filesystem::path& path);
EmbeddingSidecar parse_embeddings(const std::string& text,
                                  const std::string& origin = "<memory>");

// "frame,id,left,top,width,height,1,-1,-1,-1" sorted by (frame, id), two
// decimals, LF endings.
void write_results(const TrackLog& log, const std::filesystem::path& path);
std::string format_results(const TrackLog& log);

// Text dump of every reported box, one "frame mode id x y w h" line each.
void write_box_dump(const TrackLog& log, const std::filesystem::path& path);

// Detections from a det.txt, with embeddings attached by ordinal when a
// sidecar is given.
class FileDetectionSource : public DetectionSource {
 public:
  explicit FileDetectionSource(FrameRecords records,
                               EmbeddingSidecar sidecar = {});
  std::vector<Detection> detect(int frame) override;

 private:
  FrameRecords records_;
  EmbeddingSidecar sidecar_;
};

// Loads <image_dir>/<%06d frame><ext> lazily and converts to luma.
class ImageDirFrameProvider : public FrameProvider {
 public:
  ImageDirFrameProvider(std::filesystem::path image_dir, std::string ext,
                        int frame_count);
  int frame_count() const override { return frame_count_; }
  GrayImage load(int frame) override;

  std::filesystem::path frame_path(int frame) const;

 private:
  std::filesystem::path dir_;
  std::string ext_;
  int frame_count_;
};

// Decodes JPEG/PNG/PGM into RGB. Throws IoError when unreadable.
ColorImage read_color_image(const std::filesystem::path& path);
// Writes an 8-bit grayscale image (format chosen by extension).
void write_gray_image(const GrayImage& img, const std::filesystem::path& path);

}  // namespace hybridmot::motio

#endif  // HYBRIDMOT_MOTIO_HPP_
