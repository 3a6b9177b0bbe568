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

// Search for the camera-view trajectory that maximises
//
//   J = sum_{i=1..n_p} gamma^i ln(1 - p_c(i)) + alpha^i ln p(s_v(i) | s_v(i-1))
//
// over a finite set of candidate trajectories. Each candidate is scored by
// rolling cloned copies of the safe region and the obstacle belief forward
// under the observations that candidate would produce.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "activesense/belief.hpp"
#include "activesense/collision.hpp"
#include "activesense/errors.hpp"
#include "activesense/geometry.hpp"
#include "activesense/safe_region.hpp"

namespace activesense {

struct PlannerParams {
  double t_p = 1.0;   // horizon [s]
  int n_p = 5;        // steps per horizon
  double gamma = 0.9;  // risk decay
  double alpha = 0.6;  // transition decay
  double sigma_t = 0.5;  // transition softness [rad]
  int max_trajectories = 64;
  int k_safe = 4;
  PotentialParams potential;

  double step() const { return t_p / n_p; }

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ContractViolation("PlannerParams: gamma must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractViolation("PlannerParams: alpha must lie in (0, 1)");
    if (n_p < 1) throw ContractViolation("PlannerParams: n_p must be >= 1");
    if (!(t_p > 0.0)) throw ContractViolation("PlannerParams: t_p must be positive");
    if (!(sigma_t > 0.0)) throw ContractViolation("PlannerParams: sigma_t must be positive");
    if (max_trajectories < 1) throw ContractViolation("PlannerParams: max_trajectories must be >= 1");
    if (k_safe < 0) throw ContractViolation("PlannerParams: k_safe must be >= 0");
  }
};

// Largest collision probability fed to the logarithm.
inline constexpr double kMaxLoggedProbability = 1.0 - 1e-9;
// Candidates must beat the incumbent by more than this to replace it.
inline constexpr double kScoreTieTolerance = 1e-9;

enum class ActionKind { kTraj, kObs, kSafe };

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::kTraj: return "a_traj";
    case ActionKind::kObs: return "a_obs";
    case ActionKind::kSafe: return "a_safe";
  }
  return "?";
}

struct ActionTarget {
  ActionKind kind = ActionKind::kTraj;
  VisionState aim;
  Vec3 point = Vec3::Zero();  // world point the aim looks at
  std::string source;          // SCE id, "cell:<k>" or "t=<seconds>"
};

struct ViewTrajectory {
  std::vector<VisionState> states;  // axis at the end of each planning step
  double score = 0.0;
};

// Everything a replan needs besides the candidate trajectories.
struct PlanningInputs {
  const SafeRegion* sr = nullptr;
  const WorldBelief* belief = nullptr;
  const RobotTrajectory* robot = nullptr;  // starts at the replan time
  std::span<const CameraModel> cameras;
  BeliefParams belief_params;
  PlannerParams params;
};

inline std::vector<ActionTarget> gen_states(const WorldBelief& belief, const SafeRegion& sr,
                                            const RobotTrajectory& robot_traj,
                                            const CameraModel& camera,
                                            const PlannerParams& params) {
  const double dt = params.step();
  std::vector<ActionTarget> raw;
  auto aim_at = [&](const Vec3& p) -> std::optional<VisionState> {
    if ((p - camera.origin).norm() < 1e-9) return std::nullopt;
    return camera.clamp_to_travel(direction_to_vision_state(p, camera.origin));
  };
  for (int j = 1; j <= params.n_p; ++j) {
    const Vec3 ee = robot_traj.config_at(j * dt).end_effector();
    if (auto aim = aim_at(ee)) {
      raw.push_back({ActionKind::kTraj, *aim, ee, "t=" + std::to_string(j * dt)});
    }
  }
  std::vector<const Sce*> known;
  for (const auto& s : belief.sces) {
    if (s.kind == SceKind::kKnown) known.push_back(&s);
  }
  std::sort(known.begin(), known.end(), [](const Sce* a, const Sce* b) { return a->id < b->id; });
  for (const Sce* s : known) {
    const Vec3 p = predict_state(s->state, dt).position;
    if (auto aim = aim_at(p)) raw.push_back({ActionKind::kObs, *aim, p, s->id});
  }
  auto threats = threatening_cells(sr, robot_traj, params.t_p, params.potential.radius,
                                   params.k_safe);
  std::sort(threats.begin(), threats.end(),
            [](const ThreatCell& a, const ThreatCell& b) { return a.cell < b.cell; });
  const bool co_located = (camera.origin - sr.origin()).norm() < 1e-9;
  for (const auto& t : threats) {
    const Vec3 p = sr.boundary_point(t.cell);
    VisionState aim = sr.grid().center(t.cell);
    if (!co_located) {
      if (auto a = aim_at(p)) aim = *a;
    }
    raw.push_back({ActionKind::kSafe, camera.clamp_to_travel(aim), p,
                   "cell:" + std::to_string(t.cell)});
  }

  const double merge = 0.5 * sr.grid().max_angular_radius();
  std::vector<ActionTarget> out;
  for (auto& t : raw) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](const ActionTarget& o) {
      return angular_distance(o.aim, t.aim) < merge;
    });
    if (!dup) out.push_back(std::move(t));
  }
  return out;
}

// States reachable in one planning step: hold, then one step toward each
// target; duplicates removed (first kept).
inline std::vector<VisionState> successor_states(const VisionState& from,
                                                 std::span<const ActionTarget> targets,
                                                 double max_step) {
  std::vector<VisionState> out{from};
  for (const auto& t : targets) {
    const VisionState next = step_toward(from, t.aim, max_step);
    const bool dup = std::any_of(out.begin(), out.end(), [&](const VisionState& s) {
      return angular_distance(s, next) <= 1e-12;
    });
    if (!dup) out.push_back(next);
  }
  return out;
}

// Softmax of -angular_distance / sigma_t over `candidates`, evaluated at `next`.
inline double transition_prob(const VisionState& prev, const VisionState& next,
                              std::span<const VisionState> candidates, double sigma_t) {
  double total = 0.0;
  double mine = -1.0;
  for (const auto& c : candidates) {
    const double w = std::exp(-angular_distance(prev, c) / sigma_t);
    total += w;
    if (mine < 0.0 && angular_distance(c, next) <= 1e-12) mine = w;
  }
  if (mine < 0.0) throw ContractViolation("transition_prob: next state is not a candidate");
  return mine / total;
}

// Candidate trajectories. Each step either holds (option 0) or moves toward
// target i (option i + 1), clipped to the slew limit. Option sequences are
// ordered by number of switches between consecutive options, then
// lexicographically; sequences producing an already-seen state sequence are
// dropped, and the list is truncated to max_trajectories.
inline std::vector<ViewTrajectory> gen_trajs(std::span<const ActionTarget> targets,
                                             const VisionState& s_v0, const CameraModel& camera,
                                             const PlannerParams& params) {
  const int n = params.n_p;
  const int options = static_cast<int>(targets.size()) + 1;
  const double max_step = camera.max_slew_rate * params.step();
  const auto cap = static_cast<std::size_t>(params.max_trajectories);

  std::vector<ViewTrajectory> out;
  std::set<std::vector<std::pair<double, double>>> seen;
  std::vector<int> opt(n);
  std::vector<VisionState> states(n);

  auto emit = [&]() {
    std::vector<std::pair<double, double>> key;
    key.reserve(n);
    for (const auto& s : states) key.emplace_back(s.azimuth, s.elevation);
    if (seen.insert(std::move(key)).second) out.push_back({states, 0.0});
  };

  // Depth-first over positions with exactly `switches` changes in total.
  auto dfs = [&](auto&& self, int pos, int used, int switches) -> void {
    if (out.size() >= cap) return;
    if (pos == n) {
      if (used == switches) emit();
      return;
    }
    const VisionState& from = pos == 0 ? s_v0 : states[pos - 1];
    for (int o = 0; o < options && out.size() < cap; ++o) {
      const int u = used + (pos > 0 && o != opt[pos - 1] ? 1 : 0);
      const int remaining = n - pos - 1;
      if (u > switches || u + remaining < switches) continue;
      opt[pos] = o;
      states[pos] = o == 0 ? from : step_toward(from, targets[o - 1].aim, max_step);
      self(self, pos + 1, u, switches);
    }
  };
  for (int s = 0; s < n && out.size() < cap; ++s) dfs(dfs, 0, 0, s);
  return out;
}

namespace detail {

// Per-replan data shared by every candidate evaluation.
struct StepContext {
  RobotConfig robot_next;
  TrajectoryClearance clearance;
};

inline std::vector<StepContext> make_step_contexts(const PlanningInputs& in) {
  std::vector<StepContext> out;
  const double dt = in.params.step();
  for (int j = 0; j < in.params.n_p; ++j) {
    const double t_next = (j + 1) * dt;
    out.push_back({in.robot->config_at(t_next),
                   TrajectoryClearance(*in.robot, t_next, in.params.t_p,
                                       in.params.potential.radius)});
  }
  return out;
}

inline double evaluate(const std::vector<std::vector<VisionState>>& axes_by_step,
                       const std::vector<VisionState>& start_axes, int camera_index,
                       std::span<const ActionTarget> targets, const PlanningInputs& in,
                       const std::vector<StepContext>& steps, ProbabilityCache* cache) {
  const double dt = in.params.step();
  const double max_step = in.cameras[camera_index].max_slew_rate * dt;
  SafeRegion sr = *in.sr;
  WorldBelief belief = *in.belief;
  double J = 0.0;
  std::vector<double> p;
  for (int j = 0; j < in.params.n_p; ++j) {
    const auto& axes = axes_by_step[j];
    const StepContext& step = steps[j];
    sr = evolve(sr, visibility_mask(sr.grid(), in.cameras, axes), dt);

    p.clear();
    WorldBelief next;
    next.timestamp = belief.timestamp + dt;
    next.sces.reserve(belief.sces.size());
    for (const auto& s : belief.sces) {
      const Vec3 predicted = s.state.position + dt * s.state.velocity;
      bool observed = false;
      for (std::size_t c = 0; c < in.cameras.size() && !observed; ++c) {
        observed = in_fov(in.cameras[c], axes[c], predicted) &&
                   !segment_blocked(in.cameras[c].origin, predicted, step.robot_next);
      }
      Sce evolved = evolve_sce(s, observed, dt, in.belief_params, cache);
      Sce at_start = s;
      at_start.state.certainty = evolved.state.certainty;
      p.push_back(cpe_single(at_start, observed, step.robot_next, dt, in.belief_params.a_max));
      next.sces.push_back(std::move(evolved));
    }
    for (const auto& pot : spawn_potential(sr, step.clearance, in.params.t_p, in.belief_params,
                                           in.params.potential)) {
      p.push_back(cpe_single(pot, false, step.robot_next, dt, in.belief_params.a_max));
    }
    belief = std::move(next);

    const double pc = std::min(cpe_aggregate(p), kMaxLoggedProbability);
    const VisionState& prev = j == 0 ? start_axes[camera_index] : axes_by_step[j - 1][camera_index];
    const VisionState& cur = axes[camera_index];
    const auto candidates = successor_states(prev, targets, max_step);
    const double pt = transition_prob(prev, cur, candidates, in.params.sigma_t);
    const double i = j + 1.0;
    J += std::pow(in.params.gamma, i) * std::log(1.0 - pc) +
         std::pow(in.params.alpha, i) * std::log(pt);
  }
  return J;
}

// Axes of every camera at every step: `camera_index` follows `trajectory`,
// others follow `fixed[c]` (holding their last state when shorter).
inline std::vector<std::vector<VisionState>> rig_axes(
    const ViewTrajectory& trajectory, int camera_index,
    std::span<const ViewTrajectory> fixed, const std::vector<VisionState>& start_axes,
    int n_p) {
  std::vector<std::vector<VisionState>> out(n_p, start_axes);
  for (int j = 0; j < n_p; ++j) {
    for (std::size_t c = 0; c < start_axes.size(); ++c) {
      if (static_cast<int>(c) == camera_index) {
        out[j][c] = trajectory.states[j];
      } else if (c < fixed.size() && !fixed[c].states.empty()) {
        const auto& st = fixed[c].states;
        out[j][c] = st[std::min<std::size_t>(j, st.size() - 1)];
      }
    }
  }
  return out;
}

}  // namespace detail

// Score of one candidate for camera `camera_index`. The safe region and the
// belief in `in` are cloned, never modified. `others[c]` gives the planned
// trajectory of camera c (empty = hold `start_axes[c]`).
inline double evaluate_trajectory(const ViewTrajectory& trajectory, int camera_index,
                                  std::span<const ViewTrajectory> others,
                                  const std::vector<VisionState>& start_axes,
                                  std::span<const ActionTarget> targets,
                                  const PlanningInputs& in, ProbabilityCache* cache = nullptr) {
  const auto steps = detail::make_step_contexts(in);
  const auto axes = detail::rig_axes(trajectory, camera_index, others, start_axes, in.params.n_p);
  return detail::evaluate(axes, start_axes, camera_index, targets, in, steps, cache);
}

// Optional record of one search, for JSON-lines planner traces.
struct SearchTrace {
  int camera = 0;
  std::vector<double> scores;
  int chosen = 0;
};

// Best trajectory for camera `camera_index`, other cameras fixed to `others`.
inline ViewTrajectory coos_search_camera(int camera_index,
                                         std::span<const ViewTrajectory> others,
                                         const std::vector<VisionState>& start_axes,
                                         std::span<const ActionTarget> targets,
                                         const PlanningInputs& in,
                                         ProbabilityCache* cache = nullptr,
                                         SearchTrace* trace = nullptr) {
  const auto& camera = in.cameras[camera_index];
  auto candidates = gen_trajs(targets, start_axes[camera_index], camera, in.params);
  const auto steps = detail::make_step_contexts(in);
  int best = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto axes =
        detail::rig_axes(candidates[k], camera_index, others, start_axes, in.params.n_p);
    candidates[k].score = detail::evaluate(axes, start_axes, camera_index, targets, in, steps, cache);
    if (k > 0 && candidates[k].score > candidates[best].score + kScoreTieTolerance) {
      best = static_cast<int>(k);
    }
  }
  if (trace) {
    trace->camera = camera_index;
    trace->scores.clear();
    for (const auto& c : candidates) trace->scores.push_back(c.score);
    trace->chosen = best;
  }
  return candidates[best];
}

// Single-camera search over the targets produced by gen_states.
inline ViewTrajectory coos_search(const VisionState& s_v0, const SafeRegion& sr,
                                  const WorldBelief& belief, const RobotTrajectory& robot_traj,
                                  std::span<const CameraModel> cameras,
                                  const BeliefParams& belief_params, const PlannerParams& params,
                                  int camera_index = 0) {
  params.validate();
  PlanningInputs in{&sr, &belief, &robot_traj, cameras, belief_params, params};
  std::vector<VisionState> start(cameras.size(), s_v0);
  start[camera_index] = s_v0;
  const auto targets = gen_states(belief, sr, robot_traj, cameras[camera_index], params);
  ProbabilityCache cache;
  return coos_search_camera(camera_index, {}, start, targets, in, &cache);
}

// Sequential greedy plan for a whole rig: camera 0 first, then each later
// camera with a_obs / a_safe targets already covered by earlier cameras'
// chosen trajectories removed.
inline std::vector<ViewTrajectory> plan_rig(const std::vector<VisionState>& start_axes,
                                            const PlanningInputs& in,
                                            std::vector<SearchTrace>* traces = nullptr) {
  in.params.validate();
  const auto n_cam = static_cast<int>(in.cameras.size());
  std::vector<ViewTrajectory> chosen(n_cam);
  ProbabilityCache cache;
  if (traces) traces->clear();
  for (int c = 0; c < n_cam; ++c) {
    auto targets = gen_states(*in.belief, *in.sr, *in.robot, in.cameras[c], in.params);
    std::erase_if(targets, [&](const ActionTarget& t) {
      if (t.kind == ActionKind::kTraj) return false;
      for (int prev = 0; prev < c; ++prev) {
        for (const auto& s : chosen[prev].states) {
          if (in_fov(in.cameras[prev], s, t.point)) return true;
        }
      }
      return false;
    });
    SearchTrace trace;
    chosen[c] = coos_search_camera(c, chosen, start_axes, targets, in, &cache,
                                   traces ? &trace : nullptr);
    if (traces) traces->push_back(std::move(trace));
  }
  return chosen;
}

}  // namespace activesense
