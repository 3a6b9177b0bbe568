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

// run / compare / validate commands and their CSV and JSON artifacts.
// Commands return process exit codes: 0 ok, 2 usage or input error,
// 3 environment error (output not writable).

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "activesense/scenario_io.hpp"
#include "activesense/sim.hpp"

namespace activesense {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitEnvironment = 3;

struct RunConfig {
  std::string scenario_path;
  std::string policy;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool trace = false;
};

namespace cli_detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string num(double v) { return std::isnan(v) ? "" : fmt("%.6f", v); }

// Creates `dir` if needed and checks that files can be written into it.
inline bool prepare_dir(const std::string& dir, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    err << "error: cannot create output directory '" << dir << "'\n";
    return false;
  }
  const auto probe = std::filesystem::path(dir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) {
      err << "error: output directory '" << dir << "' is not writable\n";
      return false;
    }
  }
  std::filesystem::remove(probe, ec);
  return true;
}

inline bool write_file(const std::filesystem::path& path, const std::string& body,
                       std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << body;
  f.close();
  if (!f) {
    err << "error: failed to write '" << path.string() << "'\n";
    return false;
  }
  return true;
}

}  // namespace cli_detail

inline std::string coverage_csv(const Coverage& c) {
  std::string out = "part,ratio\n";
  for (int p = 0; p < kPartCount; ++p) {
    out += std::string(kPartNames[p]) + "," + cli_detail::fmt("%.3f", c.part[p]) + "\n";
  }
  out += "Avg," + cli_detail::fmt("%.3f", c.average) + "\n";
  return out;
}

inline std::string cpe_trace_csv(const WorldTrace& trace) {
  std::string out = "t,p_c";
  for (const auto& id : trace.part_ids) out += "," + id;
  out += ",potential,potential_count\n";
  for (const auto& s : trace.steps) {
    out += cli_detail::fmt("%.3f", s.t) + "," + cli_detail::num(s.cpe);
    for (double p : s.part_cpe) out += "," + cli_detail::num(p);
    out += "," + cli_detail::num(s.potential_cpe) + "," + std::to_string(s.potential_count) + "\n";
  }
  return out;
}

inline std::string axes_csv(const WorldTrace& trace) {
  std::string out = "t,camera,az,el\n";
  for (const auto& s : trace.steps) {
    for (std::size_t c = 0; c < s.axes.size(); ++c) {
      out += cli_detail::fmt("%.3f", s.t) + "," + std::to_string(c) + "," +
             cli_detail::num(s.axes[c].azimuth) + "," + cli_detail::num(s.axes[c].elevation) +
             "\n";
    }
  }
  return out;
}

// Rows t,az_index,el_index,depth for every step recorded with detail.
inline std::string depth_csv(const WorldTrace& trace, const Scenario& scn) {
  const SphericalGrid grid(scn.grid.n_az, scn.grid.n_el);
  std::string out = "t,az_index,el_index,depth\n";
  for (const auto& s : trace.steps) {
    for (std::size_t k = 0; k < s.sr_depth.size(); ++k) {
      const int cell = static_cast<int>(k);
      out += cli_detail::fmt("%.3f", s.t) + "," + std::to_string(grid.az_index(cell)) + "," +
             std::to_string(grid.el_index(cell)) + "," + cli_detail::num(s.sr_depth[k]) + "\n";
    }
  }
  return out;
}

// One JSON object per replan: candidate scores and the chosen states.
inline std::string planner_trace_jsonl(const WorldTrace& trace) {
  std::string out;
  for (const auto& s : trace.steps) {
    if (s.planner.empty()) continue;
    nlohmann::json line;
    line["t"] = s.t;
    line["plan_seconds"] = s.plan_seconds;
    line["cameras"] = nlohmann::json::array();
    for (const auto& p : s.planner) {
      line["cameras"].push_back({{"camera", p.camera},
                                 {"candidates", p.scores.size()},
                                 {"scores", p.scores},
                                 {"chosen", p.chosen}});
    }
    nlohmann::json next = nlohmann::json::array();
    for (const auto& a : s.next_axes) next.push_back({a.azimuth, a.elevation});
    line["next_axes"] = next;
    out += line.dump() + "\n";
  }
  return out;
}

// Loads and validates a scenario; on failure prints a diagnostic and
// returns nullopt.
inline std::optional<Scenario> load_checked(const std::string& path, std::ostream& err) {
  try {
    return load_scenario(path);
  } catch (const ScenarioError& e) {
    err << "error: " << (e.field().rfind(path, 0) == 0 ? "" : path + ": ") << e.what() << "\n";
  }
  return std::nullopt;
}

inline int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto scn = load_checked(path, err);
  if (!scn) return kExitInput;
  out << path << ": ok (" << scn->cameras.size() << " camera(s), " << scn->humanoids.size()
      << " humanoid(s), " << scn->steps() << " steps)\n";
  return kExitOk;
}

struct RunResult {
  int exit_code = kExitOk;
  Coverage coverage;
};

inline RunResult run_scenario(const Scenario& scn_in, const RunConfig& cfg, std::ostream& err) {
  RunResult res;
  Policy policy;
  try {
    policy = parse_policy(cfg.policy);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    res.exit_code = kExitInput;
    return res;
  }
  Scenario scn = scn_in;
  if (cfg.seed) scn.seed = *cfg.seed;
  if (!cli_detail::prepare_dir(cfg.out_dir, err)) {
    res.exit_code = kExitEnvironment;
    return res;
  }

  const auto start = std::chrono::steady_clock::now();
  const WorldTrace trace = run_policy(scn, policy, {cfg.trace});
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.coverage = temporal_coverage(trace);

  const std::filesystem::path dir(cfg.out_dir);
  std::vector<std::string> outputs{"coverage.csv", "cpe_trace.csv", "axes.csv"};
  bool ok = cli_detail::write_file(dir / "coverage.csv", coverage_csv(res.coverage), err) &&
            cli_detail::write_file(dir / "cpe_trace.csv", cpe_trace_csv(trace), err) &&
            cli_detail::write_file(dir / "axes.csv", axes_csv(trace), err);
  if (ok && cfg.trace) {
    outputs.push_back("sr_depth.csv");
    ok = cli_detail::write_file(dir / "sr_depth.csv", depth_csv(trace, scn), err);
    if (ok && policy == Policy::kCease) {
      outputs.push_back("planner_trace.jsonl");
      ok = cli_detail::write_file(dir / "planner_trace.jsonl", planner_trace_jsonl(trace), err);
    }
  }
  if (ok) {
    nlohmann::json manifest;
    manifest["tool"] = "activesense";
    manifest["version"] = kVersion;
    manifest["scenario_path"] = cfg.scenario_path;
    manifest["policy"] = to_string(policy);
    manifest["seed"] = scn.seed;
    manifest["steps"] = trace.steps.size();
    manifest["wall_time_s"] = wall;
    manifest["outputs"] = outputs;
    manifest["config"] = scenario_to_json(scn);
    nlohmann::json cov;
    for (int p = 0; p < kPartCount; ++p) cov[kPartNames[p]] = res.coverage.part[p];
    cov["Avg"] = res.coverage.average;
    manifest["coverage"] = cov;
    ok = cli_detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n", err);
  }
  if (!ok) res.exit_code = kExitEnvironment;
  return res;
}

inline int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto scn = load_checked(cfg.scenario_path, err);
  if (!scn) return kExitInput;
  const auto res = run_scenario(*scn, cfg, err);
  if (res.exit_code == kExitOk) {
    out << cfg.policy << ": Avg coverage " << cli_detail::fmt("%.3f", res.coverage.average)
        << " -> " << cfg.out_dir << "\n";
  }
  return res.exit_code;
}

inline std::vector<std::string> split_policies(const std::string& list) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : list + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  return out;
}

// Runs every policy on the same scenario and seed; per-policy artifacts go
// to out_dir/<policy>/ and the summary table to out_dir/compare.csv.
inline int cmd_compare(const std::string& scenario_path, const std::vector<std::string>& policies,
                       const std::string& out_dir, std::optional<std::uint64_t> seed,
                       std::ostream& out, std::ostream& err) {
  if (policies.size() < 2) {
    err << "error: compare needs at least two policies\n";
    return kExitInput;
  }
  for (const auto& p : policies) {
    try {
      parse_policy(p);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kExitInput;
    }
  }
  const auto scn = load_checked(scenario_path, err);
  if (!scn) return kExitInput;
  if (!cli_detail::prepare_dir(out_dir, err)) return kExitEnvironment;

  std::string csv = "policy,Body,RA,RH,LA,LH,Avg\n";
  out << "policy    Body   RA     RH     LA     LH     Avg\n";
  for (const auto& p : policies) {
    RunConfig cfg{scenario_path, p, (std::filesystem::path(out_dir) / p).string(), seed, false};
    const auto res = run_scenario(*scn, cfg, err);
    if (res.exit_code != kExitOk) return res.exit_code;
    std::string row = p;
    char line[160];
    std::snprintf(line, sizeof line, "%-8s", p.c_str());
    std::string pretty = line;
    for (int k = 0; k < kPartCount; ++k) {
      row += "," + cli_detail::fmt("%.3f", res.coverage.part[k]);
      pretty += "  " + cli_detail::fmt("%.3f", res.coverage.part[k]);
    }
    row += "," + cli_detail::fmt("%.3f", res.coverage.average);
    pretty += "  " + cli_detail::fmt("%.3f", res.coverage.average);
    csv += row + "\n";
    out << pretty << "\n";
  }
  if (!cli_detail::write_file(std::filesystem::path(out_dir) / "compare.csv", csv, err)) {
    return kExitEnvironment;
  }
  return kExitOk;
}

}  // namespace activesense
