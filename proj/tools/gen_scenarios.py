#!/usr/bin/env python3
# Copyright 2026 The Activesense Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the bundled scenario files.

The arm is a 3-link capsule chain (base column, upper arm, forearm) driven
by a periodic joint-space script and sampled into link endpoints. Both
scenarios share the arm and the camera rig; they differ in how the
humanoid moves. The arm's yaw sweep is centred away from the humanoid so
that following the end effector turns the cameras away from the person
for part of every cycle, while the far end of the sweep still brings the
links within reach of the swinging hands.
"""

import argparse
import json
import math
import pathlib

ARM_PERIOD = 6.0
ARM_DT = 0.05
BASE_HEIGHT = 0.30
UPPER = 0.35
FORE = 0.30


def arm_config(t, yaw_centre, yaw_amplitude):
    w = 2.0 * math.pi * t / ARM_PERIOD
    yaw = math.radians(yaw_centre) + math.radians(yaw_amplitude) * math.sin(w)
    pitch = math.radians(20.0) + math.radians(15.0) * math.sin(2.0 * w)
    elbow = math.radians(-35.0) + math.radians(20.0) * math.cos(w)
    base = (0.0, 0.0, 0.0)
    shoulder = (0.0, 0.0, BASE_HEIGHT)

    def along(origin, length, elev):
        c = math.cos(elev)
        return (origin[0] + length * c * math.cos(yaw),
                origin[1] + length * c * math.sin(yaw),
                origin[2] + length * math.sin(elev))

    elbow_pt = along(shoulder, UPPER, pitch)
    wrist = along(elbow_pt, FORE, pitch + elbow)
    r = lambda v: [round(x, 6) for x in v]
    return [
        {"a": r(base), "b": r(shoulder), "r": 0.06},
        {"a": r(shoulder), "b": r(elbow_pt), "r": 0.05},
        {"a": r(elbow_pt), "b": r(wrist), "r": 0.045},
    ]


def robot(yaw_centre, yaw_amplitude):
    n = int(round(ARM_PERIOD / ARM_DT))
    return {"dt": ARM_DT, "periodic": True,
            "samples": [arm_config(i * ARM_DT, yaw_centre, yaw_amplitude)
                        for i in range(n + 1)]}


def humanoid(base, swing_hz, amplitude_deg):
    shoulder_r = [0.0, -0.20, 0.42]
    shoulder_l = [0.0, 0.20, 0.42]
    return {
        "name": "human",
        "parts": {
            "Body": {"offset": [0.0, 0.0, 0.22], "radius": 0.16},
            "RA": {"offset": [0.0, -0.20, 0.28], "radius": 0.06},
            "RH": {"offset": [0.0, -0.20, 0.12], "radius": 0.05},
            "LA": {"offset": [0.0, 0.20, 0.28], "radius": 0.06},
            "LH": {"offset": [0.0, 0.20, 0.12], "radius": 0.05},
        },
        "base": base,
        # Positive angles about +y swing the hands toward the arm (-x).
        "right_swing": {"shoulder": shoulder_r, "axis": [0, 1, 0],
                        "amplitude_deg": amplitude_deg, "frequency_hz": swing_hz,
                        "phase_deg": 0.0},
        "left_swing": {"shoulder": shoulder_l, "axis": [0, 1, 0],
                       "amplitude_deg": amplitude_deg, "frequency_hz": swing_hz,
                       "phase_deg": 180.0},
    }


def cameras():
    def aim(origin, target):
        d = [t - o for t, o in zip(target, origin)]
        az = math.degrees(math.atan2(d[1], d[0]))
        el = math.degrees(math.atan2(d[2], math.hypot(d[0], d[1])))
        return [round(az, 3), round(el, 3)]

    rig = []
    for origin in ([0.35, -1.05, 0.55], [0.35, 1.05, 0.55]):
        rig.append({"origin": origin, "fov_deg": 72.0, "d_max": 3.0,
                    "max_slew_rate_deg_s": 120.0,
                    # Both start looking at the arm's base column.
                    "axis_deg": aim(origin, [-0.1, 0.0, 0.25])})
    return rig


def scenario(name, seed, humanoid_doc):
    return {
        "schema_version": 1,
        "name": name,
        "duration": 20.0,
        "dt": 0.05,
        "seed": seed,
        "priors": {"v_max": 1.5, "a_max": 2.0},
        "cameras": cameras(),
        "robot": robot(-90.0, 90.0),
        "humanoids": [humanoid_doc],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent /
                                         "scenarios"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    # Stationary body beside the arm, arms swinging into its workspace.
    exp1 = scenario("exp1_arm_swing", 11,
                    humanoid([{"t": 0.0, "position": [0.65, 0.10, 0.0]}], 0.35, 70.0))
    # Body walking back and forth along the table edge.
    lateral = [{"t": 0.0, "position": [0.70, -0.70, 0.0]},
               {"t": 5.0, "position": [0.70, 0.70, 0.0]},
               {"t": 10.0, "position": [0.70, -0.70, 0.0]},
               {"t": 15.0, "position": [0.70, 0.70, 0.0]},
               {"t": 20.0, "position": [0.70, -0.70, 0.0]}]
    exp2 = scenario("exp2_lateral", 23, humanoid(lateral, 0.5, 60.0))

    for doc in (exp1, exp2):
        path = out / (doc["name"] + ".json")
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
