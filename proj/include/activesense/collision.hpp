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

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "activesense/belief.hpp"
#include "activesense/errors.hpp"
#include "activesense/geometry.hpp"

namespace activesense {

struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.05;
};

// Workspace realisation of one arm configuration.
struct RobotConfig {
  std::vector<Capsule> links;

  const Vec3& end_effector() const { return links.back().b; }

  void validate() const {
    if (links.empty()) throw ContractViolation("RobotConfig: needs at least one link");
    for (const auto& l : links) {
      if (!(l.radius > 0.0)) throw ContractViolation("RobotConfig: link radius must be positive");
    }
  }
};

// Uniformly sampled arm trajectory starting at t = 0.
struct RobotTrajectory {
  std::vector<RobotConfig> samples;
  double dt = 0.1;

  double duration() const { return dt * static_cast<double>(samples.size() - 1); }

  void validate() const {
    if (samples.empty()) throw ContractViolation("RobotTrajectory: needs at least one sample");
    if (!(dt > 0.0)) throw ContractViolation("RobotTrajectory: dt must be positive");
    const std::size_t n = samples.front().links.size();
    for (const auto& s : samples) {
      s.validate();
      if (s.links.size() != n) {
        throw ContractViolation("RobotTrajectory: every sample needs the same link count");
      }
    }
  }

  // Linear interpolation of link endpoints, clamped to the sampled span.
  RobotConfig config_at(double t) const {
    if (samples.size() == 1 || t <= 0.0) return samples.front();
    const double u = t / dt;
    const auto last = samples.size() - 1;
    if (u >= static_cast<double>(last)) return samples.back();
    const auto i = static_cast<std::size_t>(std::floor(u));
    const double w = u - static_cast<double>(i);
    if (w == 0.0) return samples[i];
    RobotConfig out = samples[i];
    const RobotConfig& next = samples[i + 1];
    for (std::size_t k = 0; k < out.links.size(); ++k) {
      out.links[k].a = (1.0 - w) * samples[i].links[k].a + w * next.links[k].a;
      out.links[k].b = (1.0 - w) * samples[i].links[k].b + w * next.links[k].b;
    }
    return out;
  }
};

inline Vec3 sphere_center_world(const SceState& s, const Sphere& sphere) {
  if (sphere.offset.isZero(0.0)) return s.position;
  return s.position + rotation_from_vector(s.rotation) * sphere.offset;
}

// The collision predicate l: any obstacle sphere overlapping any arm capsule.
inline bool collides(const SceState& s, std::span<const Sphere> geometry,
                     const RobotConfig& robot) {
  for (const auto& sphere : geometry) {
    const Vec3 c = sphere_center_world(s, sphere);
    for (const auto& link : robot.links) {
      if (point_segment_distance(c, link.a, link.b) < sphere.radius + link.radius) {
        return true;
      }
    }
  }
  return false;
}

inline bool collides(const Sce& s, const RobotConfig& robot) {
  return collides(s.state, s.geometry, robot);
}

// Velocity after accelerating at a_max along its own direction for t
// seconds, expressed as an equivalent constant velocity over t.
inline Vec3 inflate_velocity(const Vec3& v, double a_max, double t) {
  const double speed = v.norm();
  if (speed < 1e-9) return v;
  return v * (1.0 + a_max * t / (2.0 * speed));
}

// Per-obstacle collision probability estimate over the next interval:
//   p = (1 - l) l' (O - 1)(u - 1) + l (1 - O u)
// where l is the collision predicate at the constant-velocity prediction and
// l' at the maximum-acceleration prediction. The certainty u is read from
// `s.state.certainty` and must already describe the end of the interval.
inline double cpe_single(const Sce& s, bool observed, const RobotConfig& robot_next,
                         double dt, double a_max) {
  const double u = s.state.certainty;
  if (!(u >= 0.0 && u <= 1.0)) throw ContractViolation("cpe_single: certainty outside [0, 1]");
  SceState predicted = s.state;
  predicted.position = s.state.position + dt * s.state.velocity;
  const double l = collides(predicted, s.geometry, robot_next) ? 1.0 : 0.0;
  double l_acc = l;
  if (l == 0.0) {
    SceState accelerated = s.state;
    accelerated.position = s.state.position + dt * inflate_velocity(s.state.velocity, a_max, dt);
    l_acc = collides(accelerated, s.geometry, robot_next) ? 1.0 : 0.0;
  }
  const double o = observed ? 1.0 : 0.0;
  const double p = (1.0 - l) * l_acc * (o - 1.0) * (u - 1.0) + l * (1.0 - o * u);
  return std::clamp(p, 0.0, 1.0);
}

// Independence combination 1 - prod(1 - p_k).
inline double cpe_aggregate(std::span<const double> per_sce) {
  double keep = 1.0;
  for (double p : per_sce) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ContractViolation("cpe_aggregate: probability outside [0, 1]");
    }
    keep *= 1.0 - p;
  }
  return 1.0 - keep;
}

struct CpeReport {
  std::vector<double> per_sce;
  double aggregate = 0.0;
};

// True when the open segment from `from` to `to` passes through an arm link.
inline bool segment_blocked(const Vec3& from, const Vec3& to, const RobotConfig& robot) {
  for (const auto& link : robot.links) {
    if (segment_segment_distance(from, to, link.a, link.b) < link.radius) return true;
  }
  return false;
}

}  // namespace activesense
