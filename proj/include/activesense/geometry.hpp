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

// Directional math on the sphere of camera pointing directions.
//
// Conventions: azimuth 0 points along world +x and grows toward +y;
// elevation is positive toward +z. Azimuth lives in [-pi, pi), elevation in
// [-pi/2, pi/2].

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "activesense/errors.hpp"

namespace activesense {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift for inputs like 3*pi.
  return w >= kPi ? -kPi : w;
}

// A camera pointing direction.
struct VisionState {
  double azimuth = 0.0;
  double elevation = 0.0;

  VisionState() = default;
  VisionState(double az, double el)
      : azimuth(wrap_angle(az)), elevation(std::clamp(el, -kPi / 2, kPi / 2)) {}

  Vec3 unit() const {
    const double c = std::cos(elevation);
    return {c * std::cos(azimuth), c * std::sin(azimuth), std::sin(elevation)};
  }

  friend bool operator==(const VisionState&, const VisionState&) = default;
};

inline VisionState vision_state_from_unit(const Vec3& u) {
  const double n = u.norm();
  if (!(n > 0.0)) throw ContractViolation("vision_state_from_unit: zero vector");
  const double z = std::clamp(u.z() / n, -1.0, 1.0);
  return VisionState(std::atan2(u.y(), u.x()), std::asin(z));
}

// Great-circle angle between two unit vectors, in [0, pi].
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline double angular_distance(const VisionState& a, const VisionState& b) {
  return angle_between(a.unit(), b.unit());
}

// Rotates `o` about the unit `axis` by `theta` (Rodrigues).
inline Vec3 rodrigues_rotate(const Vec3& o, const Vec3& axis, double theta) {
  if (std::abs(axis.norm() - 1.0) > 1e-9) {
    throw ContractViolation("rodrigues_rotate: axis must have unit norm");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return c * o + (1.0 - c) * o.dot(axis) * axis + s * axis.cross(o);
}

// Rotation matrix for a rotation vector (axis * angle).
inline Mat3 rotation_from_vector(const Vec3& rv) {
  const double angle = rv.norm();
  if (angle < 1e-12) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, rv / angle).toRotationMatrix();
}

inline VisionState direction_to_vision_state(const Vec3& point,
                                             const Vec3& origin) {
  const Vec3 d = point - origin;
  if (d.norm() < 1e-12) {
    throw ContractViolation("direction_to_vision_state: point coincides with origin");
  }
  return vision_state_from_unit(d);
}

// Moves from `from` toward `to` along the great circle by at most
// `max_angle` radians.
inline VisionState step_toward(const VisionState& from, const VisionState& to,
                               double max_angle) {
  const Vec3 a = from.unit();
  const Vec3 b = to.unit();
  const double theta = angle_between(a, b);
  if (theta <= max_angle) return to;
  if (max_angle <= 0.0) return from;
  Vec3 axis = a.cross(b);
  if (axis.norm() < 1e-12) {
    // Antipodal: any great circle works, prefer one through the zenith.
    axis = a.cross(Vec3::UnitZ());
    if (axis.norm() < 1e-12) axis = a.cross(Vec3::UnitX());
  }
  axis.normalize();
  return vision_state_from_unit(rodrigues_rotate(a, axis, max_angle));
}

// Equirectangular partition of the sphere of directions. Cell index is
// el_index * n_az + az_index.
class SphericalGrid {
 public:
  SphericalGrid(int n_az = 32, int n_el = 16) : n_az_(n_az), n_el_(n_el) {
    if (n_az < 1 || n_el < 1) {
      throw ContractViolation("SphericalGrid: cell counts must be positive");
    }
    d_az_ = 2.0 * kPi / n_az_;
    d_el_ = kPi / n_el_;
    centers_.reserve(size());
    units_.reserve(size());
    radii_.reserve(size());
    for (int j = 0; j < n_el_; ++j) {
      for (int i = 0; i < n_az_; ++i) {
        const VisionState c(-kPi + (i + 0.5) * d_az_, -kPi / 2 + (j + 0.5) * d_el_);
        centers_.push_back(c);
        units_.push_back(c.unit());
        double r = 0.0;
        for (int ci = 0; ci < 2; ++ci) {
          for (int cj = 0; cj < 2; ++cj) {
            const VisionState corner(-kPi + (i + ci) * d_az_,
                                     -kPi / 2 + (j + cj) * d_el_);
            r = std::max(r, angle_between(c.unit(), corner.unit()));
          }
          // Edge midpoints bulge past the corners near the poles.
          const VisionState edge(-kPi + (i + ci) * d_az_, c.elevation);
          r = std::max(r, angle_between(c.unit(), edge.unit()));
        }
        radii_.push_back(r);
      }
    }
  }

  int n_az() const { return n_az_; }
  int n_el() const { return n_el_; }
  int size() const { return n_az_ * n_el_; }
  int index(int az_index, int el_index) const { return el_index * n_az_ + az_index; }
  int az_index(int cell) const { return cell % n_az_; }
  int el_index(int cell) const { return cell / n_az_; }

  const VisionState& center(int cell) const { return centers_[cell]; }
  const Vec3& center_unit(int cell) const { return units_[cell]; }
  const std::vector<VisionState>& centers() const { return centers_; }

  // Largest angle from the cell centre to any point of the cell.
  double angular_radius(int cell) const { return radii_[cell]; }
  double max_angular_radius() const {
    return *std::max_element(radii_.begin(), radii_.end());
  }

  int cell_of(const VisionState& s) const {
    int i = static_cast<int>(std::floor((s.azimuth + kPi) / d_az_));
    int j = static_cast<int>(std::floor((s.elevation + kPi / 2) / d_el_));
    i = std::clamp(i, 0, n_az_ - 1);
    j = std::clamp(j, 0, n_el_ - 1);
    return index(i, j);
  }
  int cell_of(const Vec3& direction) const {
    return cell_of(vision_state_from_unit(direction));
  }

  // 8-connected neighbours, azimuth wraps, elevation clamps at the poles.
  std::vector<int> neighbors8(int cell) const {
    std::vector<int> out;
    const int i = az_index(cell);
    const int j = el_index(cell);
    for (int dj = -1; dj <= 1; ++dj) {
      const int jj = j + dj;
      if (jj < 0 || jj >= n_el_) continue;
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const int ii = ((i + di) % n_az_ + n_az_) % n_az_;
        const int k = index(ii, jj);
        if (k != cell && std::find(out.begin(), out.end(), k) == out.end()) {
          out.push_back(k);
        }
      }
    }
    return out;
  }

 private:
  int n_az_;
  int n_el_;
  double d_az_;
  double d_el_;
  std::vector<VisionState> centers_;
  std::vector<Vec3> units_;
  std::vector<double> radii_;
};

struct CameraModel {
  Vec3 origin = Vec3::Zero();
  double fov_half_angle = 36.0 * kPi / 180.0;
  double d_max = 3.0;
  double max_slew_rate = 2.0;  // rad/s

  // Optional servo travel limits; unset means the full sphere is reachable.
  std::optional<double> min_azimuth, max_azimuth;
  std::optional<double> min_elevation, max_elevation;

  void validate() const {
    if (!(fov_half_angle > 0.0 && fov_half_angle < kPi / 2)) {
      throw ContractViolation("CameraModel: fov_half_angle must lie in (0, pi/2)");
    }
    if (!(d_max > 0.0)) throw ContractViolation("CameraModel: d_max must be positive");
    if (!(max_slew_rate >= 0.0)) {
      throw ContractViolation("CameraModel: max_slew_rate must be non-negative");
    }
  }

  VisionState clamp_to_travel(const VisionState& s) const {
    double az = s.azimuth;
    double el = s.elevation;
    if (min_azimuth) az = std::max(az, *min_azimuth);
    if (max_azimuth) az = std::min(az, *max_azimuth);
    if (min_elevation) el = std::max(el, *min_elevation);
    if (max_elevation) el = std::min(el, *max_elevation);
    return {az, el};
  }
};

inline bool in_fov(const CameraModel& camera, const VisionState& optical_axis,
                   const Vec3& point) {
  const Vec3 d = point - camera.origin;
  const double range = d.norm();
  if (range > camera.d_max) return false;
  if (range < 1e-12) return true;
  return angle_between(optical_axis.unit(), d / range) <= camera.fov_half_angle;
}

// Closest point on segment [a, b] to p.
inline Vec3 closest_point_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-24) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  return (p - closest_point_on_segment(p, a, b)).norm();
}

// Minimum distance between segments [p0, p1] and [q0, q1].
inline double segment_segment_distance(const Vec3& p0, const Vec3& p1,
                                       const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double kEps = 1e-18;
  double s = 0.0;
  double t = 0.0;
  if (a <= kEps && e <= kEps) return r.norm();
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > kEps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

}  // namespace activesense
