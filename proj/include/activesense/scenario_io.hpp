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

// Scenario documents (JSON, schema_version 1). Angles are in degrees on
// disk and radians in memory.

#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "activesense/errors.hpp"
#include "activesense/sim.hpp"
#include "json.hpp"

namespace activesense {

inline constexpr int kSchemaVersion = 1;

namespace scenario_detail {

using nlohmann::json;

inline double deg(double d) { return d * kPi / 180.0; }
inline double to_deg(double r) { return r * 180.0 / kPi; }

inline const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(path + "." + key, "missing required field");
  return *it;
}

inline const json* maybe(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  return j.get<double>();
}

inline double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ScenarioError(path, "must be positive");
  return v;
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ScenarioError(path, "expected an integer");
  return j.get<int>();
}

inline Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError(path, "expected [x, y, z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline std::pair<double, double> range(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ScenarioError(path, "expected [min, max]");
  const double a = number(j[0], path + "[0]"), b = number(j[1], path + "[1]");
  if (!(a <= b)) throw ScenarioError(path, "min must not exceed max");
  return {a, b};
}

inline void opt_number(const json& j, const std::string& key, const std::string& path,
                       double& out, bool must_be_positive = true) {
  if (const json* v = maybe(j, key, path)) {
    out = must_be_positive ? positive(*v, path + "." + key) : number(*v, path + "." + key);
  }
}

inline ScenarioCamera parse_camera(const json& j, const std::string& path) {
  ScenarioCamera c;
  c.model.origin = vec3(need(j, "origin", path), path + ".origin");
  if (const json* f = maybe(j, "fov_deg", path)) {
    const double fov = positive(*f, path + ".fov_deg");
    if (!(fov < 180.0)) throw ScenarioError(path + ".fov_deg", "must be below 180");
    c.model.fov_half_angle = deg(fov) / 2.0;
  }
  opt_number(j, "d_max", path, c.model.d_max);
  if (const json* s = maybe(j, "max_slew_rate_deg_s", path)) {
    c.model.max_slew_rate = deg(positive(*s, path + ".max_slew_rate_deg_s"));
  }
  const json& axis = need(j, "axis_deg", path);
  if (!axis.is_array() || axis.size() != 2) {
    throw ScenarioError(path + ".axis_deg", "expected [azimuth, elevation]");
  }
  const double az = number(axis[0], path + ".axis_deg[0]");
  const double el = number(axis[1], path + ".axis_deg[1]");
  if (std::abs(el) > 90.0) throw ScenarioError(path + ".axis_deg[1]", "elevation outside [-90, 90]");
  c.initial_axis = VisionState(deg(az), deg(el));
  if (const json* lim = maybe(j, "limits_deg", path)) {
    const std::string lp = path + ".limits_deg";
    if (const json* r = maybe(*lim, "azimuth", lp)) {
      const auto [lo, hi] = range(*r, lp + ".azimuth");
      c.model.min_azimuth = deg(lo);
      c.model.max_azimuth = deg(hi);
    }
    if (const json* r = maybe(*lim, "elevation", lp)) {
      const auto [lo, hi] = range(*r, lp + ".elevation");
      c.model.min_elevation = deg(lo);
      c.model.max_elevation = deg(hi);
    }
  }
  return c;
}

inline ArmSwing parse_swing(const json& j, const std::string& path) {
  ArmSwing s;
  s.shoulder = vec3(need(j, "shoulder", path), path + ".shoulder");
  const Vec3 axis = vec3(need(j, "axis", path), path + ".axis");
  if (axis.norm() < 1e-9) throw ScenarioError(path + ".axis", "must be nonzero");
  s.axis = axis.normalized();
  s.amplitude = deg(number(need(j, "amplitude_deg", path), path + ".amplitude_deg"));
  s.frequency = number(need(j, "frequency_hz", path), path + ".frequency_hz");
  if (s.frequency < 0.0) throw ScenarioError(path + ".frequency_hz", "must be >= 0");
  if (const json* ph = maybe(j, "phase_deg", path)) s.phase = deg(number(*ph, path + ".phase_deg"));
  return s;
}

inline HumanoidScript parse_humanoid(const json& j, const std::string& path) {
  HumanoidScript h;
  const json& name = need(j, "name", path);
  if (!name.is_string() || name.get<std::string>().empty()) {
    throw ScenarioError(path + ".name", "expected a nonempty string");
  }
  h.name = name.get<std::string>();
  const json& parts = need(j, "parts", path);
  const std::string pp = path + ".parts";
  for (int p = 0; p < kPartCount; ++p) {
    const std::string key = kPartNames[p];
    const json& part = need(parts, key, pp);
    h.offsets[p] = vec3(need(part, "offset", pp + "." + key), pp + "." + key + ".offset");
    h.radii[p] = positive(need(part, "radius", pp + "." + key), pp + "." + key + ".radius");
  }
  for (auto it = parts.begin(); it != parts.end(); ++it) {
    if (std::find_if(kPartNames.begin(), kPartNames.end(),
                     [&](const char* n) { return it.key() == n; }) == kPartNames.end()) {
      throw ScenarioError(pp + "." + it.key(), "unknown part (expected Body, RA, RH, LA, LH)");
    }
  }
  const json& base = need(j, "base", path);
  if (!base.is_array() || base.empty()) {
    throw ScenarioError(path + ".base", "expected a nonempty list of waypoints");
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    const std::string wp = path + ".base[" + std::to_string(i) + "]";
    Waypoint w;
    w.t = number(need(base[i], "t", wp), wp + ".t");
    w.position = vec3(need(base[i], "position", wp), wp + ".position");
    if (!h.base.empty() && !(w.t > h.base.back().t)) {
      throw ScenarioError(wp + ".t", "waypoint times must increase");
    }
    h.base.push_back(w);
  }
  if (const json* s = maybe(j, "right_swing", path)) h.right = parse_swing(*s, path + ".right_swing");
  if (const json* s = maybe(j, "left_swing", path)) h.left = parse_swing(*s, path + ".left_swing");
  return h;
}

inline RobotTrajectory parse_robot(const json& j, const std::string& path, bool& periodic) {
  RobotTrajectory r;
  r.dt = positive(need(j, "dt", path), path + ".dt");
  periodic = true;
  if (const json* p = maybe(j, "periodic", path)) {
    if (!p->is_boolean()) throw ScenarioError(path + ".periodic", "expected true or false");
    periodic = p->get<bool>();
  }
  const json& samples = need(j, "samples", path);
  if (!samples.is_array() || samples.empty()) {
    throw ScenarioError(path + ".samples", "expected a nonempty list of configurations");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string sp = path + ".samples[" + std::to_string(i) + "]";
    if (!samples[i].is_array() || samples[i].empty()) {
      throw ScenarioError(sp, "expected a nonempty list of links");
    }
    RobotConfig cfg;
    for (std::size_t k = 0; k < samples[i].size(); ++k) {
      const std::string lp = sp + "[" + std::to_string(k) + "]";
      const json& l = samples[i][k];
      cfg.links.push_back({vec3(need(l, "a", lp), lp + ".a"), vec3(need(l, "b", lp), lp + ".b"),
                           positive(need(l, "r", lp), lp + ".r")});
    }
    if (!r.samples.empty() && cfg.links.size() != r.samples.front().links.size()) {
      throw ScenarioError(sp, "link count differs from the first sample");
    }
    r.samples.push_back(std::move(cfg));
  }
  return r;
}

inline void parse_belief(const json& j, const std::string& path, BeliefParams& b) {
  opt_number(j, "r_p", path, b.r_p);
  if (const json* v = maybe(j, "r_o_deg", path)) b.r_o = deg(positive(*v, path + ".r_o_deg"));
  if (const json* s = maybe(j, "sensor_sigma", path)) {
    const std::string sp = path + ".sensor_sigma";
    auto sigma = [&](const char* key, double current) {
      const json* v = maybe(*s, key, sp);
      return v ? number(*v, sp + "." + key) : current;
    };
    const auto& c = b.sensor_cov;
    const double sx = sigma("position", std::sqrt(c.position(0, 0)));
    const double so = sigma("rotation", std::sqrt(c.rotation(0, 0)));
    const double sv = sigma("velocity", std::sqrt(c.velocity(0, 0)));
    const double sw = sigma("angular_velocity", std::sqrt(c.angular_velocity(0, 0)));
    for (double v : {sx, so, sv, sw}) {
      if (v < 0.0) throw ScenarioError(sp, "standard deviations must be >= 0");
    }
    b.sensor_cov = SceCovariance::isotropic(sx, so, sv, sw);
  }
}

inline void parse_planner(const json& j, const std::string& path, PlannerParams& p) {
  opt_number(j, "t_p", path, p.t_p);
  if (const json* v = maybe(j, "n_p", path)) p.n_p = integer(*v, path + ".n_p");
  opt_number(j, "gamma", path, p.gamma);
  opt_number(j, "alpha", path, p.alpha);
  opt_number(j, "sigma_t", path, p.sigma_t);
  if (const json* v = maybe(j, "max_trajectories", path)) {
    p.max_trajectories = integer(*v, path + ".max_trajectories");
  }
  if (const json* v = maybe(j, "k_safe", path)) p.k_safe = integer(*v, path + ".k_safe");
  opt_number(j, "potential_radius", path, p.potential.radius);
  opt_number(j, "potential_prior_scale", path, p.potential.prior_scale);
  if (const json* v = maybe(j, "max_potentials", path)) {
    p.potential.max_potentials = integer(*v, path + ".max_potentials");
  }
  try {
    p.validate();
  } catch (const ContractViolation& e) {
    throw ScenarioError(path, e.what());
  }
}

inline json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace scenario_detail

// Builds a Scenario from a parsed document. Throws ScenarioError naming the
// offending field.
inline Scenario scenario_from_json(const nlohmann::json& doc) {
  using namespace scenario_detail;
  const std::string root = "$";
  const json& version = need(doc, "schema_version", root);
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    throw ScenarioError("$.schema_version", "unsupported schema version (expected 1)");
  }
  Scenario s;
  if (const json* n = maybe(doc, "name", root)) {
    if (!n->is_string()) throw ScenarioError("$.name", "expected a string");
    s.name = n->get<std::string>();
  }
  opt_number(doc, "duration", root, s.duration);
  opt_number(doc, "dt", root, s.dt);
  if (const json* seed = maybe(doc, "seed", root)) {
    if (!seed->is_number_integer() || (!seed->is_number_unsigned() && seed->get<std::int64_t>() < 0)) {
      throw ScenarioError("$.seed", "expected a non-negative integer");
    }
    s.seed = seed->get<std::uint64_t>();
  }
  if (!(s.duration >= s.dt)) throw ScenarioError("$.duration", "must be at least dt");
  if (const json* pr = maybe(doc, "priors", root)) {
    opt_number(*pr, "v_max", "$.priors", s.v_max);
    opt_number(*pr, "a_max", "$.priors", s.belief.a_max);
  }

  const json& cams = need(doc, "cameras", root);
  if (!cams.is_array() || cams.empty() || cams.size() > 2) {
    throw ScenarioError("$.cameras", "expected a list of 1 or 2 cameras");
  }
  for (std::size_t i = 0; i < cams.size(); ++i) {
    s.cameras.push_back(parse_camera(cams[i], "$.cameras[" + std::to_string(i) + "]"));
  }
  s.robot = parse_robot(need(doc, "robot", root), "$.robot", s.robot_periodic);

  const json& hs = need(doc, "humanoids", root);
  if (!hs.is_array()) throw ScenarioError("$.humanoids", "expected a list");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    s.humanoids.push_back(parse_humanoid(hs[i], "$.humanoids[" + std::to_string(i) + "]"));
    for (std::size_t k = 0; k + 1 < s.humanoids.size(); ++k) {
      if (s.humanoids[k].name == s.humanoids.back().name) {
        throw ScenarioError("$.humanoids[" + std::to_string(i) + "].name", "duplicate name");
      }
    }
  }
  if (const json* b = maybe(doc, "belief", root)) parse_belief(*b, "$.belief", s.belief);
  if (const json* p = maybe(doc, "planner", root)) parse_planner(*p, "$.planner", s.planner);
  if (const json* g = maybe(doc, "grid", root)) {
    if (const json* v = maybe(*g, "n_az", "$.grid")) s.grid.n_az = integer(*v, "$.grid.n_az");
    if (const json* v = maybe(*g, "n_el", "$.grid")) s.grid.n_el = integer(*v, "$.grid.n_el");
    if (s.grid.n_az < 4) throw ScenarioError("$.grid.n_az", "must be >= 4");
    if (s.grid.n_el < 2) throw ScenarioError("$.grid.n_el", "must be >= 2");
    if (const json* m = maybe(*g, "metric", "$.grid")) {
      if (*m == "cell_separation") s.metric = NeighborMetric::kCellSeparation;
      else if (*m == "cell_centre") s.metric = NeighborMetric::kCellCentre;
      else throw ScenarioError("$.grid.metric", "expected \"cell_separation\" or \"cell_centre\"");
    }
  }
  try {
    s.validate();
  } catch (const ContractViolation& e) {
    throw ScenarioError("$", e.what());
  }
  return s;
}

// Parses scenario text; syntax errors are reported with a line number.
inline Scenario parse_scenario(const std::string& text, const std::string& source = "<input>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ScenarioError(source + ":" + std::to_string(line), "JSON syntax error");
  }
  try {
    return scenario_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(source, e.what());
  }
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, "cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

// Full document with every default written out; parsing it back yields the
// same scenario.
inline nlohmann::json scenario_to_json(const Scenario& s) {
  using namespace scenario_detail;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = s.name;
  doc["duration"] = s.duration;
  doc["dt"] = s.dt;
  doc["seed"] = s.seed;
  doc["priors"] = {{"v_max", s.v_max}, {"a_max", s.belief.a_max}};
  doc["cameras"] = json::array();
  for (const auto& c : s.cameras) {
    json cj = {{"origin", vec_json(c.model.origin)},
               {"fov_deg", to_deg(2.0 * c.model.fov_half_angle)},
               {"d_max", c.model.d_max},
               {"max_slew_rate_deg_s", to_deg(c.model.max_slew_rate)},
               {"axis_deg", {to_deg(c.initial_axis.azimuth), to_deg(c.initial_axis.elevation)}}};
    json lim = json::object();
    if (c.model.min_azimuth) {
      lim["azimuth"] = {to_deg(*c.model.min_azimuth), to_deg(*c.model.max_azimuth)};
    }
    if (c.model.min_elevation) {
      lim["elevation"] = {to_deg(*c.model.min_elevation), to_deg(*c.model.max_elevation)};
    }
    if (!lim.empty()) cj["limits_deg"] = lim;
    doc["cameras"].push_back(cj);
  }
  json samples = json::array();
  for (const auto& cfg : s.robot.samples) {
    json links = json::array();
    for (const auto& l : cfg.links) {
      links.push_back({{"a", vec_json(l.a)}, {"b", vec_json(l.b)}, {"r", l.radius}});
    }
    samples.push_back(links);
  }
  doc["robot"] = {{"dt", s.robot.dt}, {"periodic", s.robot_periodic}, {"samples", samples}};
  doc["humanoids"] = json::array();
  for (const auto& h : s.humanoids) {
    json parts = json::object();
    for (int p = 0; p < kPartCount; ++p) {
      parts[kPartNames[p]] = {{"offset", vec_json(h.offsets[p])}, {"radius", h.radii[p]}};
    }
    json base = json::array();
    for (const auto& w : h.base) base.push_back({{"t", w.t}, {"position", vec_json(w.position)}});
    auto swing = [](const ArmSwing& a) {
      return json{{"shoulder", vec_json(a.shoulder)},
                  {"axis", vec_json(a.axis)},
                  {"amplitude_deg", to_deg(a.amplitude)},
                  {"frequency_hz", a.frequency},
                  {"phase_deg", to_deg(a.phase)}};
    };
    doc["humanoids"].push_back({{"name", h.name},
                                {"parts", parts},
                                {"base", base},
                                {"right_swing", swing(h.right)},
                                {"left_swing", swing(h.left)}});
  }
  const auto& c = s.belief.sensor_cov;
  doc["belief"] = {{"r_p", s.belief.r_p},
                   {"r_o_deg", to_deg(s.belief.r_o)},
                   {"sensor_sigma",
                    {{"position", std::sqrt(c.position(0, 0))},
                     {"rotation", std::sqrt(c.rotation(0, 0))},
                     {"velocity", std::sqrt(c.velocity(0, 0))},
                     {"angular_velocity", std::sqrt(c.angular_velocity(0, 0))}}}};
  const auto& p = s.planner;
  doc["planner"] = {{"t_p", p.t_p},
                    {"n_p", p.n_p},
                    {"gamma", p.gamma},
                    {"alpha", p.alpha},
                    {"sigma_t", p.sigma_t},
                    {"max_trajectories", p.max_trajectories},
                    {"k_safe", p.k_safe},
                    {"potential_radius", p.potential.radius},
                    {"potential_prior_scale", p.potential.prior_scale},
                    {"max_potentials", p.potential.max_potentials}};
  doc["grid"] = {{"n_az", s.grid.n_az},
                 {"n_el", s.grid.n_el},
                 {"metric", s.metric == NeighborMetric::kCellCentre ? "cell_centre"
                                                                    : "cell_separation"}};
  return doc;
}

}  // namespace activesense
