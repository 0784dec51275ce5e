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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "hybridmot/association.hpp"
#include "hybridmot/error.hpp"
#include "oracles.hpp"

namespace hybridmot {
namespace {

using Match = std::pair<std::size_t, std::size_t>;

CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

TEST(Hungarian, DiagonalOptimum) {
  const auto out = hungarian_solve(from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
  ASSERT_EQ(out.matches.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(out.matches[i], (Match{i, i}));
  EXPECT_EQ(assignment_cost(from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}), out), 0.0);
}

TEST(Hungarian, RectangularExample) {
  const auto out = hungarian_solve(from_rows({{1, 2, 9}, {2, 1, 9}}));
  ASSERT_EQ(out.matches.size(), 2u);
  EXPECT_EQ(out.matches[0], (Match{0, 0}));
  EXPECT_EQ(out.matches[1], (Match{1, 1}));
  EXPECT_TRUE(out.unmatched_tracks.empty());
  ASSERT_EQ(out.unmatched_detections.size(), 1u);
  EXPECT_EQ(out.unmatched_detections[0], 2u);
}

TEST(Hungarian, EmptyMatrices) {
  EXPECT_TRUE(hungarian_solve(CostMatrix(0, 0)).matches.empty());
  const auto rows_only = hungarian_solve(CostMatrix(3, 0));
  EXPECT_EQ(rows_only.unmatched_tracks.size(), 3u);
  const auto cols_only = hungarian_solve(CostMatrix(0, 2));
  EXPECT_EQ(cols_only.unmatched_detections.size(), 2u);
}

TEST(Hungarian, RejectsNanAndNegative) {
  EXPECT_THROW(hungarian_solve(from_rows({{std::nan("")}})), InvalidArgument);
  EXPECT_THROW(hungarian_solve(from_rows({{-1.0}})), InvalidArgument);
}

TEST(Hungarian, ForbiddenEntriesNeverMatched) {
  const auto out = hungarian_solve(from_rows({{kForbidden, 1}, {kForbidden, kForbidden}}));
  ASSERT_EQ(out.matches.size(), 1u);
  EXPECT_EQ(out.matches[0], (Match{0, 1}));
  EXPECT_EQ(out.unmatched_tracks, std::vector<std::size_t>{1});
  EXPECT_EQ(out.unmatched_detections, std::vector<std::size_t>{0});
}

TEST(Hungarian, PrefersMoreMatchesOverLowerCost) {
  // Matching (0,0) alone costs 0 but blocks row 1; two matches cost 18.
  const auto out = hungarian_solve(from_rows({{0, 9}, {9, kForbidden}}));
  EXPECT_EQ(out.matches.size(), 2u);
}

TEST(Hungarian, MatchesBruteForceWithForbidden) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> cost(0, 10);
  std::bernoulli_distribution forbid(0.3);
  for (int trial = 0; trial < 300; ++trial) {
    const int r = dim(rng), c = dim(rng);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(c)));
    for (auto& row : rows) {
      for (double& v : row) v = forbid(rng) ? kForbidden : cost(rng);
    }
    const CostMatrix m = from_rows(rows);
    const auto out = hungarian_solve(m);
    const auto best = oracle::brute_force_assignment(rows);
    ASSERT_EQ(static_cast<int>(out.matches.size()), best.cardinality) << "trial " << trial;
    EXPECT_NEAR(assignment_cost(m, out), best.cost, 1e-9) << "trial " << trial;
    EXPECT_EQ(out.matches.size() + out.unmatched_tracks.size(), std::size_t(r));
    EXPECT_EQ(out.matches.size() + out.unmatched_detections.size(), std::size_t(c));
  }
}

TEST(IouCost, Examples) {
  const std::vector<BoundingBox> t{{0, 0, 2, 2}};
  const std::vector<BoundingBox> d{{0, 0, 2, 2}, {50, 50, 2, 2}, {1, 1, 2, 2}};
  const CostMatrix c = iou_cost(t, d);
  EXPECT_DOUBLE_EQ(c(0, 0), 0.0);
  EXPECT_TRUE(CostMatrix::forbidden(c(0, 1)));
  EXPECT_NEAR(c(0, 2), 6.0 / 7.0, 1e-12);
}

Track track_at(const BoundingBox& box, std::optional<Embedding> e = std::nullopt) {
  Track t;
  t.id = 1;
  t.kalman = kalman_init(box);
  t.box = box;
  t.embedding = std::move(e);
  return t;
}

TEST(FusedCost, Examples) {
  const BoundingBox box{100, 100, 40, 80};
  const std::vector<Track> tracks{track_at(box, Embedding{1.0f, 0.0f})};
  {
    const std::vector<Detection> d{{box, 0.9, Embedding{1.0f, 0.0f}}};
    EXPECT_NEAR(fused_cost(tracks, d)(0, 0), 0.0, 1e-12);
  }
  {
    const std::vector<Detection> d{{box, 0.9, Embedding{0.0f, 1.0f}}};
    EXPECT_NEAR(fused_cost(tracks, d)(0, 0), 0.98, 1e-12);
  }
  {
    const std::vector<Detection> d{{{400, 100, 40, 80}, 0.9, Embedding{1.0f, 0.0f}}};
    EXPECT_TRUE(CostMatrix::forbidden(fused_cost(tracks, d)(0, 0)));
  }
  {
    // No detection embedding: IoU fallback.
    const std::vector<Detection> d{{box, 0.9, std::nullopt}};
    EXPECT_DOUBLE_EQ(fused_cost(tracks, d)(0, 0), 0.0);
  }
}

TEST(Byte, TwoStageHandTrace) {
  const std::vector<Track> tracks{track_at({0, 0, 20, 40}), track_at({100, 0, 20, 40})};
  const std::vector<Detection> dets{{{1, 0, 20, 40}, 0.9, std::nullopt},
                                    {{101, 1, 20, 40}, 0.3, std::nullopt}};
  const ByteOutcome out = byte_associate(tracks, dets, ByteParams{});
  ASSERT_EQ(out.matches.size(), 2u);
  EXPECT_EQ(out.matches[0], (Match{0, 0}));
  EXPECT_EQ(out.matches[1], (Match{1, 1}));
  EXPECT_TRUE(out.new_track_candidates.empty());
  EXPECT_TRUE(out.unmatched_tracks.empty());

  ByteParams no_second;
  no_second.second_stage = false;
  const ByteOutcome base = byte_associate(tracks, dets, no_second);
  ASSERT_EQ(base.matches.size(), 1u);
  EXPECT_EQ(base.unmatched_tracks, std::vector<std::size_t>{1});
}

TEST(Byte, NoDetections) {
  const std::vector<Track> tracks{track_at({0, 0, 20, 40}), track_at({100, 0, 20, 40})};
  const ByteOutcome out = byte_associate(tracks, {}, ByteParams{});
  EXPECT_TRUE(out.matches.empty());
  EXPECT_EQ(out.unmatched_tracks.size(), 2u);
}

TEST(Byte, LoneConfidentDetectionBecomesCandidate) {
  const std::vector<Track> tracks{track_at({0, 0, 20, 40})};
  const std::vector<Detection> dets{{{300, 300, 20, 40}, 0.95, std::nullopt},
                                    {{200, 200, 20, 40}, 0.55, std::nullopt},
                                    {{100, 300, 20, 40}, 0.05, std::nullopt}};
  const ByteOutcome out = byte_associate(tracks, dets, ByteParams{});
  EXPECT_EQ(out.new_track_candidates, std::vector<std::size_t>{0});
  EXPECT_EQ(out.unmatched_detections, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(out.discarded, std::vector<std::size_t>{2});
}

}  // namespace
}  // namespace hybridmot
