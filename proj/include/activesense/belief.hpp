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

// Obstacle belief: kinematic state, block covariance and certainty, plus the
// per-step evolution law for obstacles that have been observed at least once.

#pragma once

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "activesense/errors.hpp"
#include "activesense/geometry.hpp"

namespace activesense {

struct SceState {
  Vec3 position = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();  // rotation vector, |rotation| <= pi
  Vec3 velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  double certainty = 0.0;

  bool finite() const {
    return position.allFinite() && rotation.allFinite() && velocity.allFinite() &&
           angular_velocity.allFinite() && std::isfinite(certainty);
  }
};

struct SceCovariance {
  Mat3 position = Mat3::Zero();
  Mat3 rotation = Mat3::Zero();
  Mat3 velocity = Mat3::Zero();
  Mat3 angular_velocity = Mat3::Zero();

  static SceCovariance isotropic(double sx, double so, double sv, double sw) {
    SceCovariance c;
    c.position = sx * sx * Mat3::Identity();
    c.rotation = so * so * Mat3::Identity();
    c.velocity = sv * sv * Mat3::Identity();
    c.angular_velocity = sw * sw * Mat3::Identity();
    return c;
  }

  SceCovariance scaled(double k) const {
    return {k * position, k * rotation, k * velocity, k * angular_velocity};
  }
};

// True when `m` is symmetric and its eigenvalues are >= -tol, both checks
// relative to max(1, largest entry).
inline bool is_symmetric_psd(const Mat3& m, double tol = 1e-9) {
  if (!m.allFinite()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> es;
  es.computeDirect(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

inline bool is_valid(const SceCovariance& c) {
  return is_symmetric_psd(c.position) && is_symmetric_psd(c.rotation) &&
         is_symmetric_psd(c.velocity) && is_symmetric_psd(c.angular_velocity);
}

enum class SceKind { kKnown, kPotential };

struct Sphere {
  Vec3 offset = Vec3::Zero();  // in the obstacle frame
  double radius = 0.1;
};

struct Sce {
  std::string id;
  SceState state;
  SceCovariance cov;
  SceKind kind = SceKind::kKnown;
  std::vector<Sphere> geometry{Sphere{}};
  // Seconds since the last valid observation. The orientation law is
  // anchored there, so its spread grows with this rather than the step.
  double unobserved_time = 0.0;
};

struct WorldBelief {
  std::vector<Sce> sces;
  double timestamp = 0.0;

  const Sce* find(const std::string& id) const {
    for (const auto& s : sces) {
      if (s.id == id) return &s;
    }
    return nullptr;
  }
  Sce* find(const std::string& id) {
    for (auto& s : sces) {
      if (s.id == id) return &s;
    }
    return nullptr;
  }
};

struct BeliefParams {
  double r_p = 0.10;  // position neighbourhood radius [m]
  double r_o = 0.20;  // orientation neighbourhood radius [rad]
  double a_max = 2.0;  // prior maximum acceleration [m/s^2]
  SceCovariance sensor_cov = SceCovariance::isotropic(0.02, 0.05, 0.05, 0.1);

  void validate() const {
    if (!(r_p > 0.0 && r_o > 0.0 && a_max > 0.0)) {
      throw ContractViolation("BeliefParams: r_p, r_o and a_max must be positive");
    }
    if (!is_valid(sensor_cov)) {
      throw ContractViolation("BeliefParams: sensor_cov must be symmetric PSD");
    }
  }
};

// Folds a rotation vector so that its angle lies in [0, pi].
inline Vec3 wrap_rotation_vector(const Vec3& rv) {
  const double angle = rv.norm();
  if (angle <= kPi) return rv;
  const double wrapped = std::remainder(angle, 2.0 * kPi);  // in [-pi, pi]
  return rv * (wrapped / angle);
}

// Constant-velocity / constant-rate prediction. Certainty is copied through.
inline SceState predict_state(const SceState& s, double dt) {
  if (dt < 0.0) throw ContractViolation("predict_state: dt must be >= 0");
  SceState out = s;
  out.position = s.position + dt * s.velocity;
  const double rate = s.angular_velocity.norm();
  if (rate >= 1e-9) {
    out.rotation = wrap_rotation_vector(
        rodrigues_rotate(s.rotation, s.angular_velocity / rate, rate * dt));
  }
  return out;
}

inline SceCovariance predict_covariance(const SceCovariance& c, bool observed,
                                        double dt, const BeliefParams& params) {
  if (dt < 0.0) throw ContractViolation("predict_covariance: dt must be >= 0");
  if (observed) return c;
  const Vec3 a = Vec3::Constant(params.a_max);
  SceCovariance out = c;
  out.velocity = c.velocity + dt * dt * (a * a.transpose());
  out.position = c.position + dt * dt * c.velocity;
  return out;
}

namespace detail {

// CDF of the chi-square distribution with three degrees of freedom.
inline double chi2_3_cdf(double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double v = std::erf(std::sqrt(0.5 * x)) -
                   std::sqrt(2.0 * x / kPi) * std::exp(-0.5 * x);
  return std::clamp(v, 0.0, 1.0);
}

inline constexpr int kOctantPoints = 512;

// Squared components of 512 area-uniform directions in the positive octant
// (Fibonacci lattice). Mirrored over the 8 sign patterns they form a
// 4096-point design on the full sphere.
inline const std::array<std::array<double, 3>, kOctantPoints>& octant_design() {
  static const auto design = [] {
    std::array<std::array<double, 3>, kOctantPoints> d{};
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < kOctantPoints; ++i) {
      const double z = (i + 0.5) / kOctantPoints;
      const double frac = std::fmod(i * golden, 1.0);
      const double phi = 0.5 * kPi * frac;
      const double rho2 = 1.0 - z * z;
      d[i] = {rho2 * std::cos(phi) * std::cos(phi),
              rho2 * std::sin(phi) * std::sin(phi), z * z};
    }
    return d;
  }();
  return design;
}

}  // namespace detail

// P(|X| < radius) for X ~ N(0, cov).
//
// The radial part is integrated exactly: along a unit direction w the
// quadratic form scales as rho^2 * w' L w with rho^2 ~ chi2(3), so the
// probability is E_w[F_chi2_3(radius^2 / w' L w)] over uniform w, evaluated
// in the covariance's principal axes on the fixed 4096-point design.
inline double neighborhood_probability(const Mat3& cov, double radius) {
  if (!(radius > 0.0)) {
    throw ContractViolation("neighborhood_probability: radius must be positive");
  }
  if (!is_symmetric_psd(cov)) {
    throw ContractViolation("neighborhood_probability: covariance must be symmetric PSD");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es;
  es.computeDirect(0.5 * (cov + cov.transpose()), Eigen::EigenvaluesOnly);
  const Vec3 lambda = es.eigenvalues().cwiseMax(0.0);
  const double r2 = radius * radius;
  if (lambda.maxCoeff() <= 0.0) return 1.0;
  double sum = 0.0;
  for (const auto& w2 : detail::octant_design()) {
    const double q = lambda[0] * w2[0] + lambda[1] * w2[1] + lambda[2] * w2[2];
    sum += q > 0.0 ? detail::chi2_3_cdf(r2 / q) : 1.0;
  }
  return std::clamp(sum / detail::kOctantPoints, 0.0, 1.0);
}

// Memoises neighborhood_probability. Planning re-evaluates the same
// covariance sequences for many candidate trajectories. Not thread-safe.
class ProbabilityCache {
 public:
  double operator()(const Mat3& cov, double radius) {
    Key key{cov(0, 0), cov(0, 1), cov(0, 2), cov(1, 1), cov(1, 2), cov(2, 2), radius};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const double p = neighborhood_probability(cov, radius);
    memo_.emplace(key, p);
    return p;
  }
  std::size_t size() const { return memo_.size(); }

 private:
  using Key = std::array<double, 7>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ull;
      for (double v : k) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      }
      return h;
    }
  };
  std::unordered_map<Key, double, KeyHash> memo_;
};

namespace detail {
inline double probability(const Mat3& cov, double radius, ProbabilityCache* cache) {
  return cache ? (*cache)(cov, radius) : neighborhood_probability(cov, radius);
}
}  // namespace detail

// Certainty after a valid observation with measurement covariance `meas_cov`.
inline double certainty_valid(const SceCovariance& meas_cov, const BeliefParams& params,
                              ProbabilityCache* cache = nullptr) {
  return detail::probability(meas_cov.position, params.r_p, cache) *
         detail::probability(meas_cov.rotation, params.r_o, cache);
}

// Certainty after a further `dt` seconds without a valid observation. The
// orientation spread is measured from the last valid observation.
inline double certainty_invalid(const Sce& s, double dt, const BeliefParams& params,
                                ProbabilityCache* cache = nullptr) {
  if (dt < 0.0) throw ContractViolation("certainty_invalid: dt must be >= 0");
  const double dt2 = dt * dt;
  const double t = s.unobserved_time + dt;
  const Mat3 pos = s.cov.position + dt2 * s.cov.velocity;
  const Mat3 rot = t * t * s.cov.angular_velocity;
  return detail::probability(pos, params.r_p, cache) *
         detail::probability(rot, params.r_o, cache);
}

// Advances one obstacle by dt given whether it is validly observed.
inline Sce evolve_sce(const Sce& s, bool observed, double dt, const BeliefParams& params,
                      ProbabilityCache* cache = nullptr) {
  Sce out = s;
  out.state = predict_state(s.state, dt);
  out.cov = predict_covariance(s.cov, observed, dt, params);
  out.unobserved_time = observed ? 0.0 : s.unobserved_time + dt;
  out.state.certainty = observed ? certainty_valid(params.sensor_cov, params, cache)
                                 : certainty_invalid(s, dt, params, cache);
  return out;
}

using ObservationFlags = std::map<std::string, bool>;

inline WorldBelief evolve_known(const WorldBelief& belief, const ObservationFlags& observed,
                                double dt, const BeliefParams& params,
                                ProbabilityCache* cache = nullptr) {
  WorldBelief out;
  out.timestamp = belief.timestamp + dt;
  out.sces.reserve(belief.sces.size());
  for (const auto& s : belief.sces) {
    auto it = observed.find(s.id);
    if (it == observed.end()) {
      throw ContractViolation("evolve_known: no observation flag for SCE '" + s.id + "'");
    }
    out.sces.push_back(evolve_sce(s, it->second, dt, params, cache));
  }
  return out;
}

// Replaces the kinematic state with a measurement (measurement certainty is
// ignored) and resets the covariance to the sensor covariance.
inline Sce fuse_measurement(const Sce& s, const SceState& meas, const BeliefParams& params,
                            ProbabilityCache* cache = nullptr) {
  if (!meas.position.allFinite() || !meas.rotation.allFinite() ||
      !meas.velocity.allFinite() || !meas.angular_velocity.allFinite()) {
    throw ContractViolation("fuse_measurement: measurement must be finite");
  }
  Sce out = s;
  out.state = meas;
  out.state.rotation = wrap_rotation_vector(meas.rotation);
  out.cov = params.sensor_cov;
  out.unobserved_time = 0.0;
  out.state.certainty = certainty_valid(params.sensor_cov, params, cache);
  return out;
}

}  // namespace activesense
