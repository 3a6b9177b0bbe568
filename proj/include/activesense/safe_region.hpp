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

// Safe region: for every direction of a spherical grid, the depth up to
// which no unseen obstacle moving at most v_max can be. Directions inside a
// camera cone are reset to d_max; the others shrink radially (contraction)
// and inherit smaller depths from nearby directions (expansion).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "activesense/belief.hpp"
#include "activesense/collision.hpp"
#include "activesense/geometry.hpp"

namespace activesense {

// How |s_vk - s_vj| is measured between two grid cells in the expansion
// neighbourhood test |s_vk - s_vj| * depth[j] < v_max * dt.
enum class NeighborMetric {
  // Angular gap between the two cells' regions, max(0, centre distance -
  // both angular radii). Zero for touching cells.
  kCellSeparation,
  // Angle between cell centres.
  kCellCentre,
};

// Grid plus per-cell neighbour lists ordered by metric distance. Shared
// (read-only) between clones of a SafeRegion.
class GridTopology {
 public:
  GridTopology(SphericalGrid grid, NeighborMetric metric)
      : grid_(std::move(grid)), metric_(metric) {
    const int n = grid_.size();
    order_.resize(static_cast<std::size_t>(n) * (n - 1));
    for (int k = 0; k < n; ++k) {
      auto* row = &order_[static_cast<std::size_t>(k) * (n - 1)];
      int m = 0;
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        row[m++] = {j, distance(k, j)};
      }
      std::stable_sort(row, row + m, [](const Entry& a, const Entry& b) {
        return a.distance < b.distance;
      });
    }
  }

  const SphericalGrid& grid() const { return grid_; }
  NeighborMetric metric() const { return metric_; }

  double distance(int k, int j) const {
    if (k == j) return 0.0;
    const double centre = angle_between(grid_.center_unit(k), grid_.center_unit(j));
    if (metric_ == NeighborMetric::kCellCentre) return centre;
    return std::max(0.0, centre - grid_.angular_radius(k) - grid_.angular_radius(j));
  }

  struct Entry {
    int cell;
    double distance;
  };
  // All other cells ordered by distance to `cell`.
  std::span<const Entry> ordered(int cell) const {
    const int n = grid_.size();
    return {&order_[static_cast<std::size_t>(cell) * (n - 1)],
            static_cast<std::size_t>(n - 1)};
  }

 private:
  SphericalGrid grid_;
  NeighborMetric metric_;
  std::vector<Entry> order_;
};

enum class DepthCause : std::uint8_t { kReset, kContracted, kExpanded };

struct CellCause {
  DepthCause kind = DepthCause::kReset;
  int from_cell = -1;  // source cell for kExpanded
};

using VisibilityMask = std::vector<std::uint8_t>;

class SafeRegion {
 public:
  SafeRegion(std::shared_ptr<const GridTopology> topology, Vec3 origin, double d_max,
             double v_max)
      : topology_(std::move(topology)), origin_(std::move(origin)), d_max_(d_max),
        v_max_(v_max) {
    if (!(d_max > 0.0 && v_max > 0.0)) {
      throw ContractViolation("SafeRegion: d_max and v_max must be positive");
    }
    depth_.assign(static_cast<std::size_t>(grid().size()), d_max);
    causes_.assign(depth_.size(), CellCause{});
  }

  const SphericalGrid& grid() const { return topology_->grid(); }
  const GridTopology& topology() const { return *topology_; }
  std::shared_ptr<const GridTopology> topology_ptr() const { return topology_; }
  const Vec3& origin() const { return origin_; }
  double d_max() const { return d_max_; }
  double v_max() const { return v_max_; }
  int size() const { return static_cast<int>(depth_.size()); }

  const std::vector<double>& depth() const { return depth_; }
  std::vector<double>& mutable_depth() { return depth_; }
  const std::vector<CellCause>& causes() const { return causes_; }

  // World point on the region boundary along cell k.
  Vec3 boundary_point(int k) const { return origin_ + depth_[k] * grid().center_unit(k); }

  // Cell containing the direction of a world point.
  int cell_of(const Vec3& p) const {
    const Vec3 d = p - origin_;
    if (d.norm() < 1e-12) return 0;
    return grid().cell_of(d);
  }

  void set_state(std::vector<double> depth, std::vector<CellCause> causes) {
    depth_ = std::move(depth);
    causes_ = std::move(causes);
  }

 private:
  std::shared_ptr<const GridTopology> topology_;
  Vec3 origin_;
  double d_max_;
  double v_max_;
  std::vector<double> depth_;
  std::vector<CellCause> causes_;
};

inline SafeRegion init_safe_region(const SphericalGrid& grid, const Vec3& origin,
                                   double d_max, double v_max,
                                   NeighborMetric metric = NeighborMetric::kCellSeparation) {
  return SafeRegion(std::make_shared<const GridTopology>(grid, metric), origin, d_max,
                    v_max);
}

// Radial contraction: every boundary point moves inward at v_max.
inline std::vector<double> contract(const SafeRegion& sr, double dt) {
  if (dt < 0.0) throw ContractViolation("contract: dt must be >= 0");
  std::vector<double> out(sr.depth().size());
  const double step = sr.v_max() * dt;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = std::max(0.0, sr.depth()[k] - step);
  }
  return out;
}

namespace detail {

// Lateral expansion for one cell: smallest depth[j] over the neighbourhood
// {j : dist(k, j) * depth[j] < reach} plus k itself. Only neighbours with
// depth below `stop_at` matter to the caller. Returns (depth, source cell).
inline std::pair<double, int> expand_cell(const SafeRegion& sr, int k, double reach,
                                          double global_min, double stop_at) {
  const auto& depth = sr.depth();
  double best = depth[k];
  int from = k;
  if (!(reach > 0.0)) return {best, from};
  const double floor = std::min(best, stop_at);
  if (global_min >= floor) return {best, from};
  for (const auto& e : sr.topology().ordered(k)) {
    const double d = depth[e.cell];
    // Remaining cells need depth < reach / distance to qualify.
    if (e.distance * global_min >= reach) break;
    if (d < best && d < floor && e.distance * d < reach) {
      best = d;
      from = e.cell;
      if (best <= global_min) break;
    }
  }
  return {best, from};
}

}  // namespace detail

// Lateral expansion candidate for every cell.
inline std::vector<double> expand(const SafeRegion& sr, double dt) {
  if (dt < 0.0) throw ContractViolation("expand: dt must be >= 0");
  const double reach = sr.v_max() * dt;
  const double global_min = *std::min_element(sr.depth().begin(), sr.depth().end());
  std::vector<double> out(sr.depth().size());
  for (int k = 0; k < sr.size(); ++k) {
    out[k] = detail::expand_cell(sr, k, reach, global_min, sr.depth()[k]).first;
  }
  return out;
}

// One step of the safe-region law: visible cells reset to d_max, the rest
// take min(contraction, expansion).
inline SafeRegion evolve(const SafeRegion& sr, const VisibilityMask& visible, double dt) {
  if (static_cast<int>(visible.size()) != sr.size()) {
    throw ContractViolation("evolve: visibility mask does not match the grid");
  }
  if (dt < 0.0) throw ContractViolation("evolve: dt must be >= 0");
  const double reach = sr.v_max() * dt;
  const auto& depth = sr.depth();
  const double global_min = *std::min_element(depth.begin(), depth.end());
  std::vector<double> next(depth.size());
  std::vector<CellCause> causes(depth.size());
  for (int k = 0; k < sr.size(); ++k) {
    if (visible[k]) {
      next[k] = sr.d_max();
      causes[k] = {DepthCause::kReset, -1};
      continue;
    }
    const double contracted = std::max(0.0, depth[k] - reach);
    const auto [expanded, from] = detail::expand_cell(sr, k, reach, global_min, contracted);
    if (expanded < contracted) {
      next[k] = expanded;
      causes[k] = {DepthCause::kExpanded, from};
    } else {
      next[k] = contracted;
      causes[k] = {DepthCause::kContracted, -1};
    }
  }
  SafeRegion out = sr;
  out.set_state(std::move(next), std::move(causes));
  return out;
}

// Cells whose centre direction lies inside any camera's cone.
inline VisibilityMask visibility_mask(const SphericalGrid& grid,
                                      std::span<const CameraModel> cameras,
                                      std::span<const VisionState> axes) {
  VisibilityMask mask(static_cast<std::size_t>(grid.size()), 0);
  for (std::size_t c = 0; c < cameras.size() && c < axes.size(); ++c) {
    const Vec3 axis = axes[c].unit();
    const double cos_limit = std::cos(cameras[c].fov_half_angle);
    for (int k = 0; k < grid.size(); ++k) {
      if (!mask[k] && axis.dot(grid.center_unit(k)) >= cos_limit) mask[k] = 1;
    }
  }
  return mask;
}

struct PotentialParams {
  double radius = 0.15;        // hand / forearm scale sphere
  double prior_scale = 10.0;   // covariance = prior_scale * sensor_cov
  int max_potentials = 16;
};

// Clearance of a world point from the arm: min over trajectory samples and
// links of (axis distance - link radius - potential radius), with the
// nearest axis point.
struct Clearance {
  double value = std::numeric_limits<double>::infinity();
  Vec3 nearest = Vec3::Zero();
};

// Arm links swept over [t_begin, t_begin + horizon] of a trajectory.
class TrajectoryClearance {
 public:
  TrajectoryClearance(const RobotTrajectory& traj, double t_begin, double horizon,
                      double potential_radius)
      : potential_radius_(potential_radius) {
    if (traj.samples.empty() || horizon < 0.0) return;
    const int n = static_cast<int>(std::floor(horizon / traj.dt + 1e-9));
    for (int i = 0; i <= n; ++i) {
      const RobotConfig cfg = traj.config_at(t_begin + i * traj.dt);
      for (const auto& l : cfg.links) links_.push_back(l);
    }
    Vec3 c = Vec3::Zero();
    for (const auto& l : links_) c += l.a + l.b;
    center_ = c / (2.0 * static_cast<double>(links_.size()));
    for (const auto& l : links_) {
      reach_ = std::max(reach_, std::max((l.a - center_).norm(), (l.b - center_).norm()));
      max_radius_ = std::max(max_radius_, l.radius);
    }
  }

  bool empty() const { return links_.empty(); }

  // Cheap lower bound on `of(p).value`.
  double lower_bound(const Vec3& p) const {
    return (p - center_).norm() - reach_ - max_radius_ - potential_radius_;
  }

  Clearance of(const Vec3& p) const {
    Clearance best;
    for (const auto& l : links_) {
      const Vec3 q = closest_point_on_segment(p, l.a, l.b);
      const double v = (p - q).norm() - l.radius - potential_radius_;
      if (v < best.value) best = {v, q};
    }
    return best;
  }

 private:
  std::vector<Capsule> links_;
  Vec3 center_ = Vec3::Zero();
  double reach_ = 0.0;
  double max_radius_ = 0.0;
  double potential_radius_;
};

struct ThreatCell {
  int cell;
  Clearance clearance;
};

// Cells whose boundary point could reach the arm within `horizon` at v_max,
// sorted by clearance (ties by cell index), truncated to `limit`.
inline std::vector<ThreatCell> threatening_cells(const SafeRegion& sr,
                                                 const TrajectoryClearance& tc,
                                                 double horizon, int limit) {
  std::vector<ThreatCell> out;
  if (!(horizon > 0.0) || limit <= 0 || tc.empty()) return out;
  const double reach = sr.v_max() * horizon;
  // Collapsed cells all sit at the origin.
  bool have_origin = false;
  Clearance origin_clearance;
  for (int k = 0; k < sr.size(); ++k) {
    const double d = sr.depth()[k];
    Clearance c;
    if (d == 0.0) {
      if (!have_origin) {
        origin_clearance = tc.of(sr.origin());
        have_origin = true;
      }
      c = origin_clearance;
    } else {
      const Vec3 p = sr.boundary_point(k);
      if (tc.lower_bound(p) > reach) continue;
      c = tc.of(p);
    }
    if (c.value <= reach) out.push_back({k, c});
  }
  std::stable_sort(out.begin(), out.end(), [](const ThreatCell& a, const ThreatCell& b) {
    return a.clearance.value < b.clearance.value;
  });
  if (static_cast<int>(out.size()) > limit) out.resize(static_cast<std::size_t>(limit));
  return out;
}

inline std::vector<ThreatCell> threatening_cells(const SafeRegion& sr,
                                                 const RobotTrajectory& robot_traj,
                                                 double horizon, double potential_radius,
                                                 int limit) {
  return threatening_cells(sr, TrajectoryClearance(robot_traj, 0.0, horizon, potential_radius),
                           horizon, limit);
}

// Worst-case obstacles placed on the safe-region boundary and aimed at the
// arm. Output is ordered by cell index.
inline std::vector<Sce> spawn_potential(const SafeRegion& sr, const TrajectoryClearance& tc,
                                        double horizon, const BeliefParams& params,
                                        const PotentialParams& potential = {}) {
  auto cells = threatening_cells(sr, tc, horizon, potential.max_potentials);
  std::sort(cells.begin(), cells.end(),
            [](const ThreatCell& a, const ThreatCell& b) { return a.cell < b.cell; });
  std::vector<Sce> out;
  out.reserve(cells.size());
  for (const auto& tcell : cells) {
    Sce s;
    s.id = "sr/" + std::to_string(tcell.cell);
    s.kind = SceKind::kPotential;
    s.state.position = sr.boundary_point(tcell.cell);
    const Vec3 to_arm = tcell.clearance.nearest - s.state.position;
    const double n = to_arm.norm();
    s.state.velocity = n > 1e-12 ? Vec3(sr.v_max() * to_arm / n) : Vec3(Vec3::Zero());
    s.state.certainty = 0.0;
    s.cov = params.sensor_cov.scaled(potential.prior_scale);
    s.geometry = {Sphere{Vec3::Zero(), potential.radius}};
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Sce> spawn_potential(const SafeRegion& sr, const RobotTrajectory& robot_traj,
                                        double horizon, const BeliefParams& params,
                                        const PotentialParams& potential = {}) {
  return spawn_potential(sr, TrajectoryClearance(robot_traj, 0.0, horizon, potential.radius),
                         horizon, params, potential);
}

// CSV rows "t,cell_az_index,cell_el_index,depth_m" for one timestep.
inline void dump_depth_csv(std::ostream& os, const SafeRegion& sr, double t) {
  const auto& g = sr.grid();
  for (int k = 0; k < sr.size(); ++k) {
    os << t << ',' << g.az_index(k) << ',' << g.el_index(k) << ',' << sr.depth()[k] << '\n';
  }
}

}  // namespace activesense
