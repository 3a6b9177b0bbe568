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

#include "activesense/collision.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

namespace activesense {
namespace {

RobotConfig single_link(const Vec3& a, const Vec3& b, double r) {
  RobotConfig cfg;
  cfg.links.push_back({a, b, r});
  return cfg;
}

Sce sphere_sce(const Vec3& p, const Vec3& v, double r, double u) {
  Sce s;
  s.id = "s";
  s.state.position = p;
  s.state.velocity = v;
  s.state.certainty = u;
  s.geometry = {Sphere{Vec3::Zero(), r}};
  return s;
}

TEST(Collides, Examples) {
  const auto arm = single_link({0, 0, 0}, {1, 0, 0}, 0.1);
  EXPECT_FALSE(collides(sphere_sce({0.5, 0.5, 0}, Vec3::Zero(), 0.1, 1), arm));
  EXPECT_TRUE(collides(sphere_sce({0.5, 0.15, 0}, Vec3::Zero(), 0.1, 1), arm));
  // Exactly touching is not a collision.
  EXPECT_FALSE(collides(sphere_sce({0.5, 0.25, 0}, Vec3::Zero(), 0.125, 1), arm));
  // Beyond the end cap.
  EXPECT_TRUE(collides(sphere_sce({1.15, 0, 0}, Vec3::Zero(), 0.1, 1), arm));
}

TEST(Collides, OffsetSpheresFollowRotation) {
  const auto arm = single_link({0, 1, -1}, {0, 1, 1}, 0.05);
  Sce s = sphere_sce({0, 0, 0}, Vec3::Zero(), 0.1, 1);
  s.geometry = {Sphere{Vec3(1, 0, 0), 0.1}};
  EXPECT_FALSE(collides(s, arm));
  s.state.rotation = {0, 0, kPi / 2};  // offset now points along +y
  EXPECT_TRUE(collides(s, arm));
}

TEST(Collides, AgreesWithDenseAxisSampling) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1), rad(0.02, 0.3);
  int disagreements = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
    const double rc = rad(rng), rs = rad(rng);
    const double gap = oracle::sampled_sphere_capsule_gap(c, rs, a, b, rc, 100000);
    if (std::abs(gap) < 1e-4) continue;  // sampling resolution
    const bool expected = gap < 0.0;
    if (collides(sphere_sce(c, Vec3::Zero(), rs, 1), single_link(a, b, rc)) != expected) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(InflateVelocity, Examples) {
  EXPECT_EQ(inflate_velocity(Vec3::Zero(), 2.0, 1.0), Vec3::Zero());
  EXPECT_TRUE(inflate_velocity({1, 0, 0}, 2.0, 1.0).isApprox(Vec3(2, 0, 0)));
  EXPECT_TRUE(inflate_velocity({0, 2, 0}, 0.0, 1.0).isApprox(Vec3(0, 2, 0)));
}

// Truth table of the estimate over (l, l', O, u).
TEST(CpeSingle, TruthTable) {
  const auto arm = single_link({0, 0, 0}, {0, 0, 1}, 0.05);
  const double dt = 0.1, a_max = 2.0;
  // l = 1: sphere already touching the link.
  const auto hit = [&](double u) { return sphere_sce({0.1, 0, 0.5}, Vec3::Zero(), 0.1, u); };
  // l = 0, l' = 1: constant velocity stops short, max acceleration reaches.
  const auto near = [&](double u) {
    return sphere_sce({0.2, 0, 0.5}, {-0.45, 0, 0}, 0.1, u);
  };
  // l = 0, l' = 0.
  const auto far = [&](double u) { return sphere_sce({2, 0, 0.5}, Vec3::Zero(), 0.1, u); };

  for (double u : {0.0, 0.3, 1.0}) {
    EXPECT_DOUBLE_EQ(cpe_single(far(u), false, arm, dt, a_max), 0.0);
    EXPECT_DOUBLE_EQ(cpe_single(far(u), true, arm, dt, a_max), 0.0);
    EXPECT_DOUBLE_EQ(cpe_single(near(u), true, arm, dt, a_max), 0.0);
    EXPECT_NEAR(cpe_single(near(u), false, arm, dt, a_max), 1.0 - u, 1e-15);
    EXPECT_NEAR(cpe_single(hit(u), true, arm, dt, a_max), 1.0 - u, 1e-15);
    EXPECT_DOUBLE_EQ(cpe_single(hit(u), false, arm, dt, a_max), 1.0);
  }
}

TEST(CpeSingle, RejectsCertaintyOutsideUnitInterval) {
  const auto arm = single_link({0, 0, 0}, {0, 0, 1}, 0.05);
  EXPECT_THROW(cpe_single(sphere_sce({1, 0, 0}, Vec3::Zero(), 0.1, 1.5), true, arm, 0.1, 2.0),
               ContractViolation);
}

TEST(CpeAggregate, Examples) {
  EXPECT_DOUBLE_EQ(cpe_aggregate(std::vector<double>{}), 0.0);
  EXPECT_DOUBLE_EQ(cpe_aggregate(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(cpe_aggregate(std::vector<double>{0.1, 1.0}), 1.0);
  EXPECT_NEAR(cpe_aggregate(std::vector<double>{0.5, 0.5}), 0.75, 1e-15);
  EXPECT_THROW(cpe_aggregate(std::vector<double>{1.2}), ContractViolation);
}

TEST(CpeAggregate, BoundedAndMonotone) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> p(1 + i % 6);
    for (auto& x : p) x = u(rng);
    const double agg = cpe_aggregate(p);
    EXPECT_GE(agg, *std::max_element(p.begin(), p.end()) - 1e-15);
    EXPECT_LE(agg, 1.0);
    auto bigger = p;
    bigger[0] = std::min(1.0, bigger[0] + 0.1);
    EXPECT_GE(cpe_aggregate(bigger), agg - 1e-15);
  }
}

TEST(RobotTrajectory, InterpolatesAndValidates) {
  RobotTrajectory traj;
  traj.dt = 1.0;
  traj.samples = {single_link({0, 0, 0}, {1, 0, 0}, 0.1), single_link({0, 0, 0}, {0, 1, 0}, 0.1)};
  EXPECT_NO_THROW(traj.validate());
  const auto mid = traj.config_at(0.5);
  EXPECT_TRUE(mid.end_effector().isApprox(Vec3(0.5, 0.5, 0)));
  EXPECT_TRUE(traj.config_at(5.0).end_effector().isApprox(Vec3(0, 1, 0)));
  traj.samples[1].links.push_back({});
  EXPECT_THROW(traj.validate(), ContractViolation);
}

TEST(SegmentBlocked, Examples) {
  const auto arm = single_link({0, -1, 0}, {0, 1, 0}, 0.1);
  EXPECT_TRUE(segment_blocked({-1, 0, 0}, {1, 0, 0}, arm));
  EXPECT_FALSE(segment_blocked({-1, 0, 0.5}, {1, 0, 0.5}, arm));
}

}  // namespace
}  // namespace activesense
