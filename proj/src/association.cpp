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

#include "hybridmot/association.hpp"

#include <algorithm>
#include <cmath>

#include "hybridmot/error.hpp"

namespace hybridmot {

namespace {

// Shortest augmenting path assignment with row/column potentials for
// rows <= cols. Returns the column assigned to each row.
std::vector<std::size_t> solve_dense(const std::vector<double>& a, std::size_t n,
                                     std::size_t m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<double> minv(m + 1);
  std::vector<char> used(m + 1);
  auto cost = [&](std::size_t i, std::size_t j) { return a[(i - 1) * m + (j - 1)]; };
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

double cosine_distance(const Embedding& a, const Embedding& b) {
  double dot = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) dot += double(a[k]) * double(b[k]);
  return std::max(0.0, 1.0 - dot);
}

// Copies `costs` with every entry above `gate` forbidden.
CostMatrix apply_gate(CostMatrix costs, double gate) {
  for (std::size_t r = 0; r < costs.rows(); ++r) {
    for (std::size_t c = 0; c < costs.cols(); ++c) {
      if (costs(r, c) > gate) costs(r, c) = kForbidden;
    }
  }
  return costs;
}

}  // namespace

AssociationOutcome hungarian_solve(const CostMatrix& costs) {
  AssociationOutcome out;
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  if (rows == 0 || cols == 0) {
    for (std::size_t r = 0; r < rows; ++r) out.unmatched_tracks.push_back(r);
    for (std::size_t c = 0; c < cols; ++c) out.unmatched_detections.push_back(c);
    return out;
  }
  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;

  double max_cost = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = costs(r, c);
      if (std::isnan(v) || v < 0.0) {
        throw InvalidArgument("hungarian_solve: costs must be non-negative and not NaN");
      }
      if (!CostMatrix::forbidden(v)) max_cost = std::max(max_cost, v);
    }
  }
  // Large enough that one extra allowed pair always beats any saving in
  // finite costs.
  const double big = (max_cost + 1.0) * double(n + 1);

  std::vector<double> a(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = transpose ? costs(j, i) : costs(i, j);
      a[i * m + j] = CostMatrix::forbidden(v) ? big : v;
    }
  }
  const std::vector<std::size_t> assign = solve_dense(a, n, m);

  std::vector<char> row_used(rows, 0), col_used(cols, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = transpose ? assign[i] : i;
    const std::size_t c = transpose ? i : assign[i];
    if (CostMatrix::forbidden(costs(r, c))) continue;
    out.matches.emplace_back(r, c);
    row_used[r] = 1;
    col_used[c] = 1;
  }
  std::sort(out.matches.begin(), out.matches.end());
  for (std::size_t r = 0; r < rows; ++r) {
    if (!row_used[r]) out.unmatched_tracks.push_back(r);
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_used[c]) out.unmatched_detections.push_back(c);
  }
  return out;
}

double assignment_cost(const CostMatrix& costs, const AssociationOutcome& outcome) {
  double total = 0.0;
  for (const auto& [r, c] : outcome.matches) total += costs(r, c);
  return total;
}

CostMatrix iou_cost(std::span<const BoundingBox> tracks,
                    std::span<const BoundingBox> dets) {
  CostMatrix costs(tracks.size(), dets.size());
  for (std::size_t r = 0; r < tracks.size(); ++r) {
    for (std::size_t c = 0; c < dets.size(); ++c) {
      const double overlap = iou(tracks[r], dets[c]);
      costs(r, c) = overlap < kMinAssociationIou ? kForbidden : 1.0 - overlap;
    }
  }
  return costs;
}

CostMatrix fused_cost(std::span<const Track> tracks, std::span<const Detection> dets,
                      double appearance_weight) {
  CostMatrix costs(tracks.size(), dets.size());
  std::vector<BoundingBox> det_boxes;
  det_boxes.reserve(dets.size());
  for (const Detection& d : dets) det_boxes.push_back(d.box);

  for (std::size_t r = 0; r < tracks.size(); ++r) {
    const Track& t = tracks[r];
    std::vector<double> gate;
    if (t.embedding) gate = mahalanobis_gate(t.kalman, det_boxes);
    for (std::size_t c = 0; c < dets.size(); ++c) {
      if (t.embedding && dets[c].embedding) {
        const double d2 = gate[c];
        if (d2 > kChi2Gate95) {
          costs(r, c) = kForbidden;
        } else {
          costs(r, c) = appearance_weight * cosine_distance(*t.embedding, *dets[c].embedding) +
                        (1.0 - appearance_weight) * (d2 / kChi2Gate95);
        }
      } else {
        const double overlap = iou(t.box, dets[c].box);
        costs(r, c) = overlap < kMinAssociationIou ? kForbidden : 1.0 - overlap;
      }
    }
  }
  return costs;
}

ByteOutcome byte_associate(std::span<const Track> tracks,
                           std::span<const Detection> dets,
                           const ByteParams& params) {
  ByteOutcome out;
  std::vector<std::size_t> high, low;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const double conf = dets[i].confidence;
    if (conf > params.tau) {
      high.push_back(i);
    } else if (conf > params.min_confidence) {
      low.push_back(i);
    } else {
      out.discarded.push_back(i);
    }
  }

  // Stage 1: every track against the confident detections.
  std::vector<Detection> high_dets;
  high_dets.reserve(high.size());
  for (std::size_t i : high) high_dets.push_back(dets[i]);
  const AssociationOutcome first = hungarian_solve(apply_gate(
      fused_cost(tracks, high_dets, params.appearance_weight), params.high_match_gate));
  for (const auto& [r, c] : first.matches) out.matches.emplace_back(r, high[c]);
  for (std::size_t c : first.unmatched_detections) {
    out.unmatched_detections.push_back(high[c]);
    if (dets[high[c]].confidence >= params.tau_init) {
      out.new_track_candidates.push_back(high[c]);
    }
  }
  const std::vector<std::size_t>& remain = first.unmatched_tracks;

  // Stage 2: leftover tracks against the low band, IoU only.
  if (params.second_stage && !remain.empty() && !low.empty()) {
    std::vector<BoundingBox> track_boxes, low_boxes;
    for (std::size_t r : remain) track_boxes.push_back(tracks[r].box);
    for (std::size_t i : low) low_boxes.push_back(dets[i].box);
    const AssociationOutcome second = hungarian_solve(
        apply_gate(iou_cost(track_boxes, low_boxes), params.low_match_gate));
    for (const auto& [r, c] : second.matches) out.matches.emplace_back(remain[r], low[c]);
    for (std::size_t r : second.unmatched_tracks) out.unmatched_tracks.push_back(remain[r]);
    for (std::size_t c : second.unmatched_detections) out.unmatched_low.push_back(low[c]);
  } else {
    out.unmatched_tracks = remain;
    out.unmatched_low = low;
  }
  std::sort(out.matches.begin(), out.matches.end());
  return out;
}

}  // namespace hybridmot
