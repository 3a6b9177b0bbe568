// Copyright 2026 The Activesense Authors
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

#include "activesense/safe_region.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"

namespace activesense {
namespace {

VisibilityMask all(int n, bool v) { return VisibilityMask(static_cast<std::size_t>(n), v); }

RobotTrajectory static_arm(const Vec3& a, const Vec3& b, double r) {
  RobotTrajectory t;
  t.dt = 0.1;
  RobotConfig cfg;
  cfg.links.push_back({a, b, r});
  t.samples = {cfg, cfg};
  return t;
}

TEST(SafeRegion, InitialisesFull) {
  const auto sr = init_safe_region(SphericalGrid(4, 2), Vec3::Zero(), 3.0, 1.5);
  EXPECT_EQ(sr.size(), 8);
  for (double d : sr.depth()) EXPECT_EQ(d, 3.0);
  EXPECT_THROW(init_safe_region(SphericalGrid(4, 2), Vec3::Zero(), 0.0, 1.5), ContractViolation);
}

TEST(SafeRegion, EvolveExamples) {
  auto sr = init_safe_region(SphericalGrid(4, 2), Vec3::Zero(), 3.0, 1.5);
  auto out = evolve(sr, all(8, true), 0.1);
  for (double d : out.depth()) EXPECT_EQ(d, 3.0);

  out = evolve(sr, all(8, false), 0.1);
  for (double d : out.depth()) EXPECT_NEAR(d, 2.85, 1e-12);

  auto zero = sr;
  zero.mutable_depth().assign(8, 0.0);
  out = evolve(zero, all(8, false), 1.0);
  for (double d : out.depth()) EXPECT_EQ(d, 0.0);

  EXPECT_THROW(evolve(sr, all(7, false), 0.1), ContractViolation);
  EXPECT_THROW(evolve(sr, all(8, false), -0.1), ContractViolation);
}

TEST(SafeRegion, ZeroElapsedIsIdentityOnHiddenCells) {
  auto sr = init_safe_region(SphericalGrid(8, 4), Vec3::Zero(), 3.0, 1.5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 3);
  for (auto& d : sr.mutable_depth()) d = u(rng);
  const auto before = sr.depth();
  const auto out = evolve(sr, all(sr.size(), false), 0.0);
  EXPECT_EQ(out.depth(), before);
}

TEST(SafeRegion, CollapsedHiddenCellPullsNeighboursDown) {
  auto sr = init_safe_region(SphericalGrid(8, 4), Vec3::Zero(), 3.0, 1.5);
  const int k = sr.grid().index(2, 1);
  sr.mutable_depth()[k] = 0.0;
  const auto out = evolve(sr, all(sr.size(), false), 0.05);
  // Depth 0 satisfies every neighbourhood test.
  for (int j = 0; j < out.size(); ++j) {
    EXPECT_EQ(out.depth()[j], 0.0);
    if (j != k) {
      EXPECT_EQ(out.causes()[j].kind, DepthCause::kExpanded);
      EXPECT_EQ(out.causes()[j].from_cell, k);
    }
  }
}

TEST(SafeRegion, MatchesBruteForceOracle) {
  for (bool centre : {false, true}) {
    const SphericalGrid grid(16, 8);
    auto sr = init_safe_region(grid, Vec3::Zero(), 3.0, 1.5,
                               centre ? NeighborMetric::kCellCentre
                                      : NeighborMetric::kCellSeparation);
    std::mt19937_64 rng(centre ? 12 : 13);
    std::bernoulli_distribution vis(0.4);
    std::uniform_real_distribution<double> dt(0.0, 0.2), depth(0.2, 3.0);
    for (auto& d : sr.mutable_depth()) d = depth(rng);
    for (int step = 0; step < 60; ++step) {
      VisibilityMask mask(static_cast<std::size_t>(grid.size()));
      for (auto& m : mask) m = vis(rng);
      const double h = dt(rng);
      const auto expected =
          oracle::brute_force_evolve(grid, sr.depth(), mask, 3.0, 1.5, h, centre);
      sr = evolve(sr, mask, h);
      ASSERT_EQ(sr.depth(), expected) << "step " << step;
    }
  }
}

TEST(SafeRegion, DepthStaysInRange) {
  const SphericalGrid grid(16, 8);
  auto sr = init_safe_region(grid, Vec3::Zero(), 2.0, 1.0);
  std::mt19937_64 rng(3);
  std::bernoulli_distribution vis(0.3);
  for (int step = 0; step < 200; ++step) {
    VisibilityMask mask(static_cast<std::size_t>(grid.size()));
    for (auto& m : mask) m = vis(rng);
    sr = evolve(sr, mask, 0.05);
    for (double d : sr.depth()) {
      ASSERT_GE(d, 0.0);
      ASSERT_LE(d, 2.0);
    }
  }
}

TEST(SafeRegion, NeighbourListsAreSorted) {
  const GridTopology topo(SphericalGrid(8, 4), NeighborMetric::kCellSeparation);
  for (int k = 0; k < topo.grid().size(); ++k) {
    const auto row = topo.ordered(k);
    ASSERT_EQ(row.size(), static_cast<std::size_t>(topo.grid().size() - 1));
    for (std::size_t i = 1; i < row.size(); ++i) {
      EXPECT_LE(row[i - 1].distance, row[i].distance);
    }
    // Adjacent cells touch.
    for (int j : topo.grid().neighbors8(k)) EXPECT_NEAR(topo.distance(k, j), 0.0, 1e-12);
  }
}

TEST(VisibilityMask, CameraConeSelectsCells) {
  const SphericalGrid grid(32, 16);
  CameraModel cam;
  const std::vector<CameraModel> cams{cam};
  const std::vector<VisionState> axes{VisionState(0.0, 0.0)};
  const auto mask = visibility_mask(grid, cams, axes);
  int count = 0;
  for (int k = 0; k < grid.size(); ++k) {
    const bool inside = angle_between(grid.center_unit(k), Vec3(1, 0, 0)) <= cam.fov_half_angle;
    EXPECT_EQ(static_cast<bool>(mask[k]), inside);
    count += mask[k];
  }
  EXPECT_GT(count, 0);
  EXPECT_LT(count, grid.size() / 2);
}

TEST(Potentials, ExamplesAndBounds) {
  BeliefParams params;
  const SphericalGrid grid(32, 16);
  auto sr = init_safe_region(grid, Vec3::Zero(), 3.0, 1.5);
  const auto near_arm = static_arm({1.5, -0.2, 0}, {1.5, 0.2, 0}, 0.05);
  const auto far_arm = static_arm({20, 0, 0}, {20, 1, 0}, 0.05);

  EXPECT_TRUE(spawn_potential(sr, near_arm, 0.0, params).empty());
  EXPECT_TRUE(spawn_potential(sr, far_arm, 1.0, params).empty());

  // Boundary at 3 m, arm at 1.5 m: cells around +x are within reach.
  const auto pots = spawn_potential(sr, near_arm, 1.0, params);
  ASSERT_FALSE(pots.empty());
  EXPECT_LE(pots.size(), 16u);
  for (std::size_t i = 0; i < pots.size(); ++i) {
    const auto& p = pots[i];
    EXPECT_EQ(p.kind, SceKind::kPotential);
    EXPECT_EQ(p.state.certainty, 0.0);
    EXPECT_NEAR(p.state.velocity.norm(), 1.5, 1e-9);
    EXPECT_NEAR(p.state.position.norm(), 3.0, 1e-9);
    EXPECT_EQ(p.id.rfind("sr/", 0), 0u);
    EXPECT_TRUE(is_valid(p.cov));
    if (i > 0) {
      EXPECT_LT(std::stoi(pots[i - 1].id.substr(3)), std::stoi(p.id.substr(3)));
    }
  }
  // Hidden space collapsing increases threat count up to the cap.
  for (auto& d : sr.mutable_depth()) d = 1.6;
  EXPECT_EQ(spawn_potential(sr, near_arm, 1.0, params).size(), 16u);
}

TEST(Potentials, ThreatsAreTheClosestCells) {
  const SphericalGrid grid(16, 8);
  auto sr = init_safe_region(grid, Vec3::Zero(), 3.0, 1.5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (auto& d : sr.mutable_depth()) d = u(rng);
  const auto arm = static_arm({1.0, -0.5, 0.2}, {1.0, 0.5, 0.2}, 0.05);
  const TrajectoryClearance tc(arm, 0.0, 1.0, 0.15);
  const auto cells = threatening_cells(sr, tc, 1.0, 5);
  ASSERT_FALSE(cells.empty());
  const double worst_kept = cells.back().clearance.value;
  std::vector<int> kept;
  for (const auto& c : cells) kept.push_back(c.cell);
  for (int k = 0; k < sr.size(); ++k) {
    if (std::find(kept.begin(), kept.end(), k) != kept.end()) continue;
    const Vec3 p = sr.boundary_point(k);
    const double clearance = point_segment_distance(p, {1.0, -0.5, 0.2}, {1.0, 0.5, 0.2}) - 0.2;
    EXPECT_GE(clearance, worst_kept - 1e-12);
  }
}

TEST(SafeRegion, DumpsDepthCsv) {
  const auto sr = init_safe_region(SphericalGrid(4, 2), Vec3::Zero(), 3.0, 1.5);
  std::ostringstream os;
  dump_depth_csv(os, sr, 0.5);
  const std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 8);
  EXPECT_EQ(s.substr(0, s.find('\n')), "0.5,0,0,3");
}

}  // namespace
}  // namespace activesense
