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

// Small hand-checkable scenario documents shared by the sim, I/O and CLI
// tests.

#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"

namespace testing_fixtures {

using nlohmann::json;

// One camera at (0, -2, 1) looking along +y, a static arm parked out of
// the way at x = -3 and a humanoid standing at the origin with its arms
// hanging still. Every part is in view on the optical axis side.
inline json tiny_doc() {
  json link = {{"a", {-3.0, 0.0, 0.0}}, {"b", {-3.0, 0.0, 0.4}}, {"r", 0.05}};
  return {
      {"schema_version", 1},
      {"name", "tiny"},
      {"duration", 1.0},
      {"dt", 0.05},
      {"seed", 7},
      {"cameras", json::array({json{{"origin", {0.0, -2.0, 1.0}},
                                    {"fov_deg", 60.0},
                                    {"d_max", 5.0},
                                    {"max_slew_rate_deg_s", 90.0},
                                    {"axis_deg", {90.0, 0.0}}}})},
      {"robot",
       {{"dt", 0.5},
        {"periodic", false},
        {"samples", json::array({json::array({link}), json::array({link})})}}},
      {"humanoids",
       json::array({json{{"name", "h"},
         {"parts",
          {{"Body", {{"offset", {0.0, 0.0, 1.0}}, {"radius", 0.15}}},
           {"RA", {{"offset", {-0.2, 0.0, 1.2}}, {"radius", 0.06}}},
           {"RH", {{"offset", {-0.2, 0.0, 0.9}}, {"radius", 0.05}}},
           {"LA", {{"offset", {0.2, 0.0, 1.2}}, {"radius", 0.06}}},
           {"LH", {{"offset", {0.2, 0.0, 0.9}}, {"radius", 0.05}}}}},
         {"base", json::array({json{{"t", 0.0}, {"position", {0.0, 0.0, 0.0}}}})}}})},
      {"planner", {{"n_p", 3}, {"max_trajectories", 16}}},
      {"grid", {{"n_az", 16}, {"n_el", 8}}},
  };
}

// Writes `text` to a fresh file under the system temp directory.
inline std::filesystem::path write_temp(const std::string& stem, const std::string& text) {
  static std::mt19937_64 rng(std::random_device{}());
  const auto dir = std::filesystem::temp_directory_path() /
                   ("activesense_" + stem + "_" + std::to_string(rng() % 1000000007ULL));
  std::filesystem::create_directories(dir);
  const auto path = dir / (stem + ".json");
  std::ofstream(path) << text;
  return path;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing_fixtures
