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

// Deterministic desk-scale world: scripted humanoids, a replayed arm
// trajectory, synthetic pose measurements, and the three camera policies.

#pragma once

#include <Eigen/Eigenvalues>

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "activesense/belief.hpp"
#include "activesense/collision.hpp"
#include "activesense/coos.hpp"
#include "activesense/errors.hpp"
#include "activesense/geometry.hpp"
#include "activesense/safe_region.hpp"

namespace activesense {

inline constexpr std::array<const char*, 5> kPartNames = {"Body", "RA", "RH", "LA", "LH"};
inline constexpr int kPartCount = 5;

// 1-DOF swing about a shoulder: theta(t) = amplitude * sin(2 pi f t + phase).
struct ArmSwing {
  Vec3 shoulder = Vec3::Zero();   // body frame
  Vec3 axis = Vec3(0, 1, 0);      // unit, body frame
  double amplitude = 0.0;         // rad
  double frequency = 0.0;         // Hz
  double phase = 0.0;             // rad

  double angle(double t) const {
    return amplitude * std::sin(2.0 * kPi * frequency * t + phase);
  }
  double rate(double t) const {
    return amplitude * 2.0 * kPi * frequency * std::cos(2.0 * kPi * frequency * t + phase);
  }
};

struct Waypoint {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
};

struct HumanoidScript {
  std::string name = "human";
  // Body-frame rest offsets and radii, indexed like kPartNames.
  std::array<Vec3, kPartCount> offsets{};
  std::array<double, kPartCount> radii{};
  std::vector<Waypoint> base;  // strictly increasing times
  ArmSwing right, left;        // right drives RA/RH, left drives LA/LH

  void validate() const {
    for (double r : radii) {
      if (!(r > 0.0)) throw ContractViolation("HumanoidScript: part radii must be positive");
    }
    if (base.empty()) throw ContractViolation("HumanoidScript: base motion needs a waypoint");
    for (std::size_t i = 1; i < base.size(); ++i) {
      if (!(base[i].t > base[i - 1].t)) {
        throw ContractViolation("HumanoidScript: waypoint times must increase");
      }
    }
    for (const auto* s : {&right, &left}) {
      if (std::abs(s->axis.norm() - 1.0) > 1e-9) {
        throw ContractViolation("HumanoidScript: swing axis must be a unit vector");
      }
    }
  }

  // Base position and velocity (piecewise linear, held at the ends).
  std::pair<Vec3, Vec3> base_at(double t) const {
    if (t <= base.front().t) return {base.front().position, Vec3::Zero()};
    if (t >= base.back().t) return {base.back().position, Vec3::Zero()};
    std::size_t i = 1;
    while (base[i].t < t) ++i;
    const auto& a = base[i - 1];
    const auto& b = base[i];
    const Vec3 v = (b.position - a.position) / (b.t - a.t);
    return {a.position + (t - a.t) * v, v};
  }

  const ArmSwing* swing_of(int part) const {
    if (part == 1 || part == 2) return &right;
    if (part == 3 || part == 4) return &left;
    return nullptr;
  }
};

// Ground-truth state of one part (certainty unused).
struct PartTruth {
  std::string id;
  int part = 0;
  SceState state;
  double radius = 0.0;
};

struct ScenarioCamera {
  CameraModel model;
  VisionState initial_axis;
};

struct GridSpec {
  int n_az = 32;
  int n_el = 16;
};

struct Scenario {
  std::string name = "scenario";
  double duration = 20.0;
  double dt = 0.05;
  std::uint64_t seed = 1;
  double v_max = 1.5;
  std::vector<ScenarioCamera> cameras;
  RobotTrajectory robot;
  bool robot_periodic = true;
  std::vector<HumanoidScript> humanoids;
  BeliefParams belief;
  PlannerParams planner;
  GridSpec grid;
  NeighborMetric metric = NeighborMetric::kCellSeparation;

  int steps() const { return static_cast<int>(std::llround(duration / dt)); }

  void validate() const {
    if (!(dt > 0.0)) throw ContractViolation("Scenario: dt must be positive");
    if (!(duration >= dt)) throw ContractViolation("Scenario: duration must be >= dt");
    if (!(v_max > 0.0)) throw ContractViolation("Scenario: v_max must be positive");
    if (cameras.empty() || cameras.size() > 2) {
      throw ContractViolation("Scenario: rig must have 1 or 2 cameras");
    }
    for (const auto& c : cameras) c.model.validate();
    robot.validate();
    for (const auto& h : humanoids) h.validate();
    belief.validate();
    planner.validate();
    if (grid.n_az < 4 || grid.n_el < 2) throw ContractViolation("Scenario: grid too small");
  }

  // Arm configuration at simulation time t (wrapped when periodic).
  RobotConfig robot_at(double t) const {
    const double period = robot.duration();
    if (robot_periodic && period > 0.0) t = std::fmod(t, period);
    return robot.config_at(t);
  }

  // Arm trajectory resampled from time t onward, for the planner.
  RobotTrajectory robot_window(double t, double length) const {
    RobotTrajectory w;
    w.dt = robot.dt;
    const int n = static_cast<int>(std::ceil(length / robot.dt - 1e-9)) + 1;
    for (int i = 0; i < n; ++i) w.samples.push_back(robot_at(t + i * robot.dt));
    return w;
  }
};

inline std::string part_id(const HumanoidScript& h, int part) {
  return h.name + "/" + kPartNames[part];
}

// Closed-form poses and analytic velocities of every part at time t.
inline std::vector<PartTruth> step_world(const Scenario& scn, double t) {
  if (!(t >= -1e-12 && t <= scn.duration + 1e-9)) {
    throw ContractViolation("step_world: t outside [0, duration]");
  }
  std::vector<PartTruth> out;
  for (const auto& h : scn.humanoids) {
    const auto [base, base_v] = h.base_at(t);
    for (int p = 0; p < kPartCount; ++p) {
      PartTruth pt;
      pt.id = part_id(h, p);
      pt.part = p;
      pt.radius = h.radii[p];
      pt.state.certainty = 1.0;
      Vec3 local = h.offsets[p];
      Vec3 v = base_v;
      if (const ArmSwing* s = h.swing_of(p)) {
        const double theta = s->angle(t);
        const Vec3 arm = rodrigues_rotate(h.offsets[p] - s->shoulder, s->axis, theta);
        local = s->shoulder + arm;
        const Vec3 omega = s->axis * s->rate(t);
        v += omega.cross(arm);
        pt.state.rotation = wrap_rotation_vector(s->axis * theta);
        pt.state.angular_velocity = omega;
      }
      pt.state.position = base + local;
      pt.state.velocity = v;
      out.push_back(std::move(pt));
    }
  }
  return out;
}

// Zero-mean Gaussian draws with the sensor covariance.
class MeasurementNoise {
 public:
  MeasurementNoise(std::uint64_t seed, const SceCovariance& cov) : rng_(seed) {
    roots_ = {root(cov.position), root(cov.rotation), root(cov.velocity),
              root(cov.angular_velocity)};
  }

  // Always consumes 12 normals, so the stream position depends only on how
  // many measurements were requested.
  SceState perturb(const SceState& truth) {
    std::array<Vec3, 4> e;
    for (auto& v : e) v = Vec3(normal_(rng_), normal_(rng_), normal_(rng_));
    SceState out = truth;
    out.position += roots_[0] * e[0];
    out.rotation = wrap_rotation_vector(out.rotation + roots_[1] * e[1]);
    out.velocity += roots_[2] * e[2];
    out.angular_velocity += roots_[3] * e[3];
    return out;
  }

 private:
  static Mat3 root(const Mat3& m) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(m);
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
  }

  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::array<Mat3, 4> roots_;
};

struct Observation {
  // [camera][part]
  std::vector<std::vector<std::uint8_t>> valid;
  std::vector<std::vector<SceState>> measurement;
};

// True when camera c sees `target` unobstructed by the arm and by every
// humanoid sphere other than `self`.
inline bool line_of_sight(const Vec3& origin, const std::vector<PartTruth>& parts, int self,
                          const RobotConfig& robot) {
  const Vec3& target = parts[self].state.position;
  if (segment_blocked(origin, target, robot)) return false;
  for (int j = 0; j < static_cast<int>(parts.size()); ++j) {
    if (j == self) continue;
    if (point_segment_distance(parts[j].state.position, origin, target) < parts[j].radius) {
      return false;
    }
  }
  return true;
}

// Validity and noisy measurement of every part from every camera. Noise is
// drawn for every (camera, part) pair, camera-major, whether valid or not.
inline Observation observe(const Scenario& scn, double t, std::span<const VisionState> axes,
                           MeasurementNoise& noise) {
  const auto parts = step_world(scn, t);
  const RobotConfig robot = scn.robot_at(t);
  Observation obs;
  for (std::size_t c = 0; c < scn.cameras.size(); ++c) {
    const auto& cam = scn.cameras[c].model;
    std::vector<std::uint8_t> valid(parts.size(), 0);
    std::vector<SceState> meas(parts.size());
    for (int p = 0; p < static_cast<int>(parts.size()); ++p) {
      meas[p] = noise.perturb(parts[p].state);
      valid[p] = in_fov(cam, axes[c], parts[p].state.position) &&
                 line_of_sight(cam.origin, parts, p, robot);
    }
    obs.valid.push_back(std::move(valid));
    obs.measurement.push_back(std::move(meas));
  }
  return obs;
}

enum class Policy { kFixed, kTcp, kCease };

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::kFixed: return "fixed";
    case Policy::kTcp: return "tcp";
    case Policy::kCease: return "cease";
  }
  return "?";
}

inline Policy parse_policy(const std::string& s) {
  if (s == "fixed") return Policy::kFixed;
  if (s == "tcp") return Policy::kTcp;
  if (s == "cease") return Policy::kCease;
  throw std::invalid_argument("unknown policy '" + s + "' (expected fixed, tcp or cease)");
}

struct StepRecord {
  double t = 0.0;
  std::vector<VisionState> axes;              // per camera, during this step
  std::vector<PartTruth> truth;
  std::vector<std::uint8_t> visible;          // per part, any camera
  std::vector<double> part_certainty;         // NaN while unknown
  std::vector<double> part_cpe;               // NaN while unknown
  double potential_cpe = 0.0;                 // aggregate over potential SCEs
  int potential_count = 0;
  double cpe = 0.0;                           // aggregate over everything
  std::vector<VisionState> next_axes;         // commanded for the next step
  std::vector<SearchTrace> planner;           // cease only, detail runs
  std::vector<double> sr_depth;               // detail runs
  double plan_seconds = 0.0;
};

struct WorldTrace {
  std::string scenario;
  Policy policy = Policy::kFixed;
  std::vector<std::string> part_ids;
  std::vector<int> part_kinds;  // index into kPartNames
  std::vector<StepRecord> steps;
};

struct RunOptions {
  // Keep per-step planner scores and safe-region depths in the trace.
  bool detail = false;
};

// Closed loop: observe, update belief and safe region, estimate risk, then
// command the next axes.
inline WorldTrace run_policy(const Scenario& scn, Policy policy, const RunOptions& opts = {}) {
  scn.validate();
  WorldTrace trace;
  trace.scenario = scn.name;
  trace.policy = policy;
  for (const auto& p : step_world(scn, 0.0)) {
    trace.part_ids.push_back(p.id);
    trace.part_kinds.push_back(p.part);
  }
  const int n_parts = static_cast<int>(trace.part_ids.size());
  const int n_cam = static_cast<int>(scn.cameras.size());

  std::vector<CameraModel> cameras;
  std::vector<VisionState> axes;
  for (const auto& c : scn.cameras) {
    cameras.push_back(c.model);
    axes.push_back(c.model.clamp_to_travel(c.initial_axis));
  }
  MeasurementNoise noise(scn.seed, scn.belief.sensor_cov);
  SafeRegion sr = init_safe_region(SphericalGrid(scn.grid.n_az, scn.grid.n_el),
                                   cameras[0].origin, cameras[0].d_max, scn.v_max, scn.metric);
  WorldBelief belief;
  ProbabilityCache cache;
  const double dt = scn.dt;
  const int steps = scn.steps();
  trace.steps.reserve(static_cast<std::size_t>(steps));

  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    StepRecord rec;
    rec.t = t;
    rec.axes = axes;
    const Observation obs = observe(scn, t, axes, noise);
    rec.truth = step_world(scn, t);
    rec.visible.assign(n_parts, 0);

    // Belief update: fuse from the first camera with a valid view, otherwise
    // propagate known parts without an observation.
    WorldBelief next;
    next.timestamp = t;
    ObservationFlags flags;
    for (int p = 0; p < n_parts; ++p) {
      int cam = -1;
      for (int c = 0; c < n_cam && cam < 0; ++c) {
        if (obs.valid[c][p]) cam = c;
      }
      rec.visible[p] = cam >= 0;
      flags[trace.part_ids[p]] = cam >= 0;
      const Sce* known = belief.find(trace.part_ids[p]);
      if (cam >= 0) {
        Sce s;
        if (known) {
          s = *known;
        } else {
          s.id = trace.part_ids[p];
          s.geometry = {Sphere{Vec3::Zero(), rec.truth[p].radius}};
        }
        next.sces.push_back(fuse_measurement(s, obs.measurement[cam][p], scn.belief, &cache));
      } else if (known) {
        next.sces.push_back(evolve_sce(*known, false, i == 0 ? 0.0 : dt, scn.belief, &cache));
      }
    }
    belief = std::move(next);
    sr = evolve(sr, visibility_mask(sr.grid(), cameras, axes), i == 0 ? 0.0 : dt);
    if (opts.detail) rec.sr_depth = sr.depth();

    // Risk over the coming step.
    const RobotConfig robot_next = scn.robot_at(t + dt);
    std::vector<double> all;
    rec.part_certainty.assign(n_parts, std::numeric_limits<double>::quiet_NaN());
    rec.part_cpe.assign(n_parts, std::numeric_limits<double>::quiet_NaN());
    for (int p = 0; p < n_parts; ++p) {
      const Sce* s = belief.find(trace.part_ids[p]);
      if (!s) continue;
      const double pk = cpe_single(*s, rec.visible[p], robot_next, dt, scn.belief.a_max);
      rec.part_certainty[p] = s->state.certainty;
      rec.part_cpe[p] = pk;
      all.push_back(pk);
    }
    const RobotTrajectory window = scn.robot_window(t, 2.0 * scn.planner.t_p + dt);
    const TrajectoryClearance tc(window, dt, scn.planner.t_p, scn.planner.potential.radius);
    std::vector<double> pot;
    for (const auto& s : spawn_potential(sr, tc, scn.planner.t_p, scn.belief,
                                         scn.planner.potential)) {
      pot.push_back(cpe_single(s, false, robot_next, dt, scn.belief.a_max));
    }
    rec.potential_count = static_cast<int>(pot.size());
    rec.potential_cpe = cpe_aggregate(pot);
    all.insert(all.end(), pot.begin(), pot.end());
    rec.cpe = cpe_aggregate(all);

    // Command the next axes.
    std::vector<VisionState> next_axes = axes;
    if (policy == Policy::kTcp) {
      const Vec3 ee = scn.robot_at(t).end_effector();
      for (int c = 0; c < n_cam; ++c) {
        if ((ee - cameras[c].origin).norm() < 1e-9) continue;
        const VisionState aim =
            cameras[c].clamp_to_travel(direction_to_vision_state(ee, cameras[c].origin));
        next_axes[c] = step_toward(axes[c], aim, cameras[c].max_slew_rate * dt);
      }
    } else if (policy == Policy::kCease) {
      const PlanningInputs in{&sr, &belief, &window, cameras, scn.belief, scn.planner};
      const auto start = std::chrono::steady_clock::now();
      const auto plan = plan_rig(axes, in, opts.detail ? &rec.planner : nullptr);
      rec.plan_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      // The plan's first state is one planner step (t_p / n_p) away; move
      // toward it no faster than the servo allows in one simulation step.
      for (int c = 0; c < n_cam; ++c) {
        next_axes[c] = step_toward(axes[c], plan[c].states.front(), cameras[c].max_slew_rate * dt);
      }
    }
    rec.next_axes = next_axes;
    axes = std::move(next_axes);
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

struct Coverage {
  std::array<double, kPartCount> part{};
  double average = 0.0;
};

// Fraction of steps in which each part was validly observed by at least one
// camera. Parts of several humanoids sharing a name are averaged.
inline Coverage temporal_coverage(const WorldTrace& trace) {
  if (trace.steps.empty()) throw ContractViolation("temporal_coverage: empty trace");
  Coverage cov;
  std::array<int, kPartCount> count{};
  const double n = static_cast<double>(trace.steps.size());
  for (std::size_t p = 0; p < trace.part_ids.size(); ++p) {
    int seen = 0;
    for (const auto& s : trace.steps) seen += s.visible[p];
    cov.part[trace.part_kinds[p]] += seen / n;
    ++count[trace.part_kinds[p]];
  }
  double sum = 0.0;
  for (int k = 0; k < kPartCount; ++k) {
    if (count[k] > 0) cov.part[k] /= count[k];
    sum += cov.part[k];
  }
  cov.average = sum / kPartCount;
  return cov;
}

}  // namespace activesense
